#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace collie {

struct ChatMessage {
  std::string role;  // "user" or "assistant"
  std::string content;
};

struct CompletionRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.7;
  int max_tokens = 1024;
};

struct CompletionResult {
  bool ok = false;
  std::string text;
  std::string error;

  static CompletionResult success(std::string text) {
    CompletionResult r;
    r.ok = true;
    r.text = std::move(text);
    return r;
  }
  static CompletionResult failure(std::string error) {
    CompletionResult r;
    r.error = std::move(error);
    return r;
  }
};

/// Minimal chat-completion interface; the harness only ever talks to this,
/// so recorded cassettes and scripted mocks drop in for tests.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string model_name() const = 0;
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
};

/// Token-bucket limiter; acquire() blocks until a request slot is free.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_minute);
  void acquire();

 private:
  std::mutex mutex_;
  double tokens_;
  double per_second_;
  double burst_;
  std::chrono::steady_clock::time_point last_;
};

struct HttpClientConfig {
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string api_key;   // held in memory only, never serialized
  std::string model;
  int timeout_seconds = 60;
  int max_retries = 5;  // exponential backoff on transient failures
  double requests_per_minute = 60.0;
  int max_parallel = 4;

  /// Reads COLLIE_API_BASE and COLLIE_API_KEY.
  static HttpClientConfig from_env(std::string model);
};

std::unique_ptr<ModelClient> make_http_client(HttpClientConfig config);

}  // namespace collie
