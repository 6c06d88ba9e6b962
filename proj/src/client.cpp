#include "collie/client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "collie/json.hpp"

namespace collie {

RateLimiter::RateLimiter(double requests_per_minute)
    : tokens_(requests_per_minute > 0 ? 1.0 : 0.0),
      per_second_(requests_per_minute / 60.0),
      burst_(requests_per_minute > 0 ? requests_per_minute / 60.0 + 1.0 : 0.0),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  if (per_second_ <= 0) return;  // unlimited
  for (;;) {
    {
      std::lock_guard lock(mutex_);
      auto now = std::chrono::steady_clock::now();
      double elapsed = std::chrono::duration<double>(now - last_).count();
      last_ = now;
      tokens_ = std::min(burst_, tokens_ + elapsed * per_second_);
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

HttpClientConfig HttpClientConfig::from_env(std::string model) {
  HttpClientConfig config;
  if (const char* base = std::getenv("COLLIE_API_BASE")) config.base_url = base;
  if (const char* key = std::getenv("COLLIE_API_KEY")) config.api_key = key;
  config.model = std::move(model);
  return config;
}

namespace {

bool transient_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

class HttpModelClient : public ModelClient {
 public:
  explicit HttpModelClient(HttpClientConfig config)
      : config_(std::move(config)), limiter_(config_.requests_per_minute) {}

  std::string model_name() const override { return config_.model; }

  CompletionResult complete(const CompletionRequest& request) override {
    json payload;
    payload["model"] = config_.model;
    json messages = json::array();
    for (const ChatMessage& message : request.messages) {
      json m;
      m["role"] = message.role;
      m["content"] = message.content;
      messages.push_back(std::move(m));
    }
    payload["messages"] = std::move(messages);
    payload["temperature"] = request.temperature;
    payload["max_tokens"] = request.max_tokens;
    const std::string body = payload.dump();

    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt < std::max(1, config_.max_retries); ++attempt) {
      if (attempt > 0) {
        // 1s, 2s, 4s, 8s ... capped at 30s
        int delay_ms = std::min(30000, 1000 << std::min(attempt - 1, 5));
        std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      }
      limiter_.acquire();

      httplib::Client http(config_.base_url);
      http.set_connection_timeout(config_.timeout_seconds, 0);
      http.set_read_timeout(config_.timeout_seconds, 0);
      httplib::Headers headers;
      if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

      auto response = http.Post("/chat/completions", headers, body, "application/json");
      if (!response) {
        last_error = "transport error: " + httplib::to_string(response.error());
        continue;
      }
      if (response->status == 200) {
        try {
          json reply = json::parse(response->body);
          return CompletionResult::success(
              reply.at("choices").at(0).at("message").at("content").get<std::string>());
        } catch (const std::exception& e) {
          return CompletionResult::failure(std::string("malformed response: ") + e.what());
        }
      }
      last_error = "HTTP " + std::to_string(response->status);
      if (!transient_status(response->status))
        return CompletionResult::failure(last_error + ": " + response->body);
    }
    return CompletionResult::failure("retries exhausted: " + last_error);
  }

 private:
  HttpClientConfig config_;
  RateLimiter limiter_;
};

}  // namespace

std::unique_ptr<ModelClient> make_http_client(HttpClientConfig config) {
  return std::make_unique<HttpModelClient>(std::move(config));
}

}  // namespace collie
