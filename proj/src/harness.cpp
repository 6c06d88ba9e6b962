#include "collie/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "collie/eval.hpp"
#include "collie/render.hpp"
#include "collie/spec_json.hpp"

namespace collie {

namespace {

const std::string* first_user_message(const CompletionRequest& request) {
  for (const ChatMessage& message : request.messages) {
    if (message.role == "user") return &message.content;
  }
  return nullptr;
}

class EchoGroundTruthClient : public ModelClient {
 public:
  explicit EchoGroundTruthClient(const Dataset& dataset) {
    for (const ConstraintInstance& instance : dataset.instances)
      examples_.emplace(instance.prompt, instance.example);
  }

  std::string model_name() const override { return "mock-echo-ground-truth"; }

  CompletionResult complete(const CompletionRequest& request) override {
    const std::string* prompt = first_user_message(request);
    if (prompt == nullptr) return CompletionResult::failure("no user message");
    auto it = examples_.find(*prompt);
    if (it == examples_.end())
      return CompletionResult::failure("unknown prompt: " + *prompt);
    return CompletionResult::success(it->second);
  }

 private:
  std::unordered_map<std::string, std::string> examples_;
};

class ConstantViolatorClient : public ModelClient {
 public:
  explicit ConstantViolatorClient(std::string text) : text_(std::move(text)) {}
  std::string model_name() const override { return "mock-constant-violator"; }
  CompletionResult complete(const CompletionRequest&) override {
    return CompletionResult::success(text_);
  }

 private:
  std::string text_;
};

// Breaks the generation-level structure of the example: one word becomes
// two tokens, one sentence becomes two, a paragraph two paragraphs, and a
// passage collapses to a single paragraph.
std::string break_example(Level level, const std::string& example) {
  switch (level) {
    case Level::Word:
    case Level::Char:
      return example + " " + example;
    case Level::Sentence:
      return example + ". " + example;
    case Level::Paragraph:
      return example + "\n\n" + example;
    case Level::Passage: {
      std::string collapsed = example;
      std::size_t pos;
      while ((pos = collapsed.find("\n\n")) != std::string::npos)
        collapsed.replace(pos, 2, " ");
      return collapsed;
    }
  }
  return example;
}

class ScriptedFeedbackClient : public ModelClient {
 public:
  explicit ScriptedFeedbackClient(const Dataset& dataset) {
    for (const ConstraintInstance& instance : dataset.instances) {
      Entry entry;
      entry.example = instance.example;
      entry.wrong = break_example(instance.spec.gen_level, instance.example);
      // Values the evaluator measured on the broken generation; the fix is
      // withheld until the feedback mentions one of them.
      EvalReport report = check(instance.spec, entry.wrong);
      for (const AtomVerdict& verdict : report.verdicts) {
        if (verdict.satisfied) continue;
        if (const auto* n = std::get_if<std::int64_t>(&verdict.actual)) {
          entry.expected_tokens.push_back(std::to_string(*n));
        } else if (const auto* s = std::get_if<std::string>(&verdict.actual)) {
          entry.expected_tokens.push_back("'" + *s + "'");
        } else if (const auto* list =
                       std::get_if<std::vector<std::int64_t>>(&verdict.actual)) {
          for (std::int64_t n : *list) entry.expected_tokens.push_back(std::to_string(n));
        }
      }
      entries_.emplace(instance.prompt, std::move(entry));
    }
  }

  std::string model_name() const override { return "mock-scripted-feedback"; }

  CompletionResult complete(const CompletionRequest& request) override {
    const std::string* prompt = first_user_message(request);
    if (prompt == nullptr) return CompletionResult::failure("no user message");
    auto it = entries_.find(*prompt);
    if (it == entries_.end())
      return CompletionResult::failure("unknown prompt: " + *prompt);
    const Entry& entry = it->second;

    if (request.messages.size() == 1) return CompletionResult::success(entry.wrong);
    const std::string& feedback = request.messages.back().content;
    for (const std::string& token : entry.expected_tokens) {
      if (feedback.find(token) != std::string::npos)
        return CompletionResult::success(entry.example);
    }
    return CompletionResult::success(entry.wrong);
  }

 private:
  struct Entry {
    std::string example;
    std::string wrong;
    std::vector<std::string> expected_tokens;
  };
  std::unordered_map<std::string, Entry> entries_;
};

json request_to_json(const CompletionRequest& request) {
  json messages = json::array();
  for (const ChatMessage& message : request.messages) {
    json m;
    m["role"] = message.role;
    m["content"] = message.content;
    messages.push_back(std::move(m));
  }
  json out;
  out["messages"] = std::move(messages);
  out["temperature"] = request.temperature;
  out["max_tokens"] = request.max_tokens;
  return out;
}

class RecordingClient : public ModelClient {
 public:
  RecordingClient(ModelClient& inner, const std::filesystem::path& cassette)
      : inner_(inner), out_(cassette, std::ios::binary | std::ios::app) {
    if (!out_) throw std::runtime_error("cannot write cassette: " + cassette.string());
  }

  std::string model_name() const override { return inner_.model_name(); }

  CompletionResult complete(const CompletionRequest& request) override {
    CompletionResult result = inner_.complete(request);
    json line;
    line["request"] = request_to_json(request);
    json response;
    response["ok"] = result.ok;
    response["text"] = result.text;
    response["error"] = result.error;
    line["response"] = std::move(response);
    std::lock_guard lock(mutex_);
    out_ << line.dump() << "\n";
    out_.flush();
    return result;
  }

 private:
  ModelClient& inner_;
  std::ofstream out_;
  std::mutex mutex_;
};

class ReplayClient : public ModelClient {
 public:
  ReplayClient(const std::filesystem::path& cassette, std::string model_name)
      : model_name_(std::move(model_name)) {
    std::ifstream in(cassette);
    if (!in) throw std::runtime_error("cannot read cassette: " + cassette.string());
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      json record = json::parse(line);
      recordings_[record.at("request").dump()].push_back(record.at("response"));
    }
  }

  std::string model_name() const override { return model_name_; }

  CompletionResult complete(const CompletionRequest& request) override {
    std::lock_guard lock(mutex_);
    auto it = recordings_.find(request_to_json(request).dump());
    if (it == recordings_.end() || it->second.empty())
      return CompletionResult::failure("no recorded response for this request");
    json response = it->second.front();
    if (it->second.size() > 1) it->second.erase(it->second.begin());
    CompletionResult result;
    result.ok = response.value("ok", false);
    result.text = response.value("text", std::string());
    result.error = response.value("error", std::string());
    return result;
  }

 private:
  std::string model_name_;
  std::unordered_map<std::string, std::vector<json>> recordings_;
  std::mutex mutex_;
};

void sort_records(std::vector<GenerationRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const GenerationRecord& a, const GenerationRecord& b) {
              return std::tie(a.instance_id, a.trial, a.round) <
                     std::tie(b.instance_id, b.trial, b.round);
            });
}

GenerationRecord base_record(const ConstraintInstance& instance, const ModelClient& client,
                             const RunOptions& options) {
  GenerationRecord record;
  record.instance_id = instance.id;
  record.structure = instance.structure;
  record.source = instance.source;
  record.gen_level = instance.spec.gen_level;
  record.model = client.model_name();
  record.temperature = options.temperature;
  return record;
}

// Ten failures in a row with no success in between reads as a dead
// endpoint rather than flaky trials.
constexpr std::size_t kAbortAfterConsecutiveErrors = 10;

// Runs `jobs` tasks over a small worker pool; `fn(job_index)` must be
// thread-safe apart from the shared sink it locks itself. Tasks stop being
// scheduled once `stop` becomes true.
void parallel_for(std::size_t jobs, int max_parallel, const std::atomic<bool>& stop,
                  const std::function<void(std::size_t)>& fn) {
  int workers = std::max(1, max_parallel);
  if (workers == 1 || jobs <= 1) {
    for (std::size_t i = 0; i < jobs && !stop.load(); ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        if (stop.load()) return;
        std::size_t i = next.fetch_add(1);
        if (i >= jobs) return;
        fn(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace

RunResults run_zero_shot(const Dataset& dataset, ModelClient& client,
                         const RunOptions& options) {
  RunResults results;
  std::mutex sink_mutex;
  std::atomic<bool> stop{false};
  std::size_t consecutive_errors = 0;
  const std::size_t trials = static_cast<std::size_t>(std::max(1, options.trials));
  const std::size_t jobs = dataset.instances.size() * trials;

  parallel_for(jobs, options.max_parallel, stop, [&](std::size_t job) {
    const ConstraintInstance& instance = dataset.instances[job / trials];
    const int trial = static_cast<int>(job % trials);

    GenerationRecord record = base_record(instance, client, options);
    record.trial = trial;
    record.round = 1;
    record.transcript = {ChatMessage{"user", instance.prompt}};

    CompletionRequest request;
    request.messages = record.transcript;
    request.temperature = options.temperature;
    request.max_tokens = options.max_tokens;

    auto started = std::chrono::steady_clock::now();
    CompletionResult result = client.complete(request);
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (result.ok) {
      record.generation = result.text;
      EvalReport report = check(instance.spec, result.text);
      record.satisfied = report.overall;
      record.report = report_to_json(report);
    } else {
      record.errored = true;
      record.error = result.error;
    }

    std::lock_guard lock(sink_mutex);
    results.requests += 1;
    if (record.errored) {
      results.errored_trials += 1;
      if (++consecutive_errors >= kAbortAfterConsecutiveErrors) {
        results.aborted = true;
        stop.store(true);
      }
    } else {
      consecutive_errors = 0;
    }
    if (options.on_record) options.on_record(record);
    results.records.push_back(std::move(record));
  });

  sort_records(results.records);
  return results;
}

RunResults run_feedback_rounds(const Dataset& dataset, ModelClient& client,
                               const RunOptions& options) {
  if (options.rounds < 2)
    throw std::invalid_argument("run_feedback_rounds needs at least 2 rounds");

  RunResults results;
  std::mutex sink_mutex;
  std::atomic<bool> stop{false};
  std::size_t consecutive_errors = 0;

  parallel_for(dataset.instances.size(), options.max_parallel, stop, [&](std::size_t i) {
    const ConstraintInstance& instance = dataset.instances[i];
    std::vector<ChatMessage> transcript{ChatMessage{"user", instance.prompt}};

    for (int round = 1; round <= options.rounds; ++round) {
      GenerationRecord record = base_record(instance, client, options);
      record.trial = 0;
      record.round = round;
      record.transcript = transcript;

      CompletionRequest request;
      request.messages = transcript;
      request.temperature = options.temperature;
      request.max_tokens = options.max_tokens;

      auto started = std::chrono::steady_clock::now();
      CompletionResult result = client.complete(request);
      record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

      bool done_with_instance = false;
      std::string feedback;
      if (result.ok) {
        record.generation = result.text;
        EvalReport report = check(instance.spec, result.text);
        record.satisfied = report.overall;
        record.report = report_to_json(report);
        if (report.overall) {
          done_with_instance = true;  // satisfied: no further requests
        } else {
          feedback = render_feedback(report);
        }
      } else {
        record.errored = true;
        record.error = result.error;
        done_with_instance = true;
      }

      {
        std::lock_guard lock(sink_mutex);
        results.requests += 1;
        if (record.errored) {
          results.errored_trials += 1;
          if (++consecutive_errors >= kAbortAfterConsecutiveErrors) {
            results.aborted = true;
            stop.store(true);
          }
        } else {
          consecutive_errors = 0;
        }
        if (options.on_record) options.on_record(record);
        results.records.push_back(record);
      }
      if (done_with_instance) break;

      transcript.push_back(ChatMessage{"assistant", record.generation});
      transcript.push_back(ChatMessage{"user", feedback});
    }
  });

  sort_records(results.records);
  return results;
}

json record_to_json(const GenerationRecord& record) {
  json out;
  out["instance_id"] = record.instance_id;
  out["structure"] = record.structure;
  out["source"] = record.source;
  out["gen_level"] = to_string(record.gen_level);
  out["trial"] = record.trial;
  out["round"] = record.round;
  out["model"] = record.model;
  out["temperature"] = record.temperature;
  json transcript = json::array();
  for (const ChatMessage& message : record.transcript) {
    json m;
    m["role"] = message.role;
    m["content"] = message.content;
    transcript.push_back(std::move(m));
  }
  out["transcript"] = std::move(transcript);
  out["generation"] = record.generation;
  out["satisfied"] = record.satisfied;
  out["errored"] = record.errored;
  out["error"] = record.error;
  out["seconds"] = record.seconds;
  out["report"] = record.report;
  return out;
}

GenerationRecord record_from_json(const json& value) {
  GenerationRecord record;
  record.instance_id = value.at("instance_id").get<std::string>();
  record.structure = value.value("structure", std::string());
  record.source = value.value("source", std::string());
  if (auto level = level_from_string(value.value("gen_level", std::string("sentence"))))
    record.gen_level = *level;
  record.trial = value.value("trial", 0);
  record.round = value.value("round", 1);
  record.model = value.value("model", std::string());
  record.temperature = value.value("temperature", 0.7);
  if (auto it = value.find("transcript"); it != value.end()) {
    for (const auto& m : *it)
      record.transcript.push_back(
          ChatMessage{m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  }
  record.generation = value.value("generation", std::string());
  record.satisfied = value.value("satisfied", false);
  record.errored = value.value("errored", false);
  record.error = value.value("error", std::string());
  record.seconds = value.value("seconds", 0.0);
  if (auto it = value.find("report"); it != value.end()) record.report = *it;
  return record;
}

void write_records(const std::vector<GenerationRecord>& records, std::ostream& out) {
  for (const GenerationRecord& record : records) out << record_to_json(record).dump() << "\n";
}

std::vector<GenerationRecord> read_records(std::istream& in) {
  std::vector<GenerationRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view trimmed = trim(line);
    if (trimmed.empty()) continue;
    json value = json::parse(trimmed);
    if (value.contains("meta")) continue;  // header line
    records.push_back(record_from_json(value));
  }
  return records;
}

std::unique_ptr<ModelClient> make_echo_ground_truth_client(const Dataset& dataset) {
  return std::make_unique<EchoGroundTruthClient>(dataset);
}

std::unique_ptr<ModelClient> make_constant_violator_client(std::string text) {
  return std::make_unique<ConstantViolatorClient>(std::move(text));
}

std::unique_ptr<ModelClient> make_scripted_feedback_client(const Dataset& dataset) {
  return std::make_unique<ScriptedFeedbackClient>(dataset);
}

std::unique_ptr<ModelClient> make_recording_client(ModelClient& inner,
                                                   const std::filesystem::path& cassette) {
  return std::make_unique<RecordingClient>(inner, cassette);
}

std::unique_ptr<ModelClient> make_replay_client(const std::filesystem::path& cassette,
                                                std::string model_name) {
  return std::make_unique<ReplayClient>(cassette, std::move(model_name));
}

}  // namespace collie
