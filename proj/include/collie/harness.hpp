#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "collie/client.hpp"
#include "collie/extract.hpp"
#include "collie/json.hpp"

namespace collie {

struct GenerationRecord {
  std::string instance_id;
  std::string structure;
  std::string source;
  Level gen_level = Level::Sentence;
  int trial = 0;
  int round = 1;  // 1 = zero-shot; later rounds carry feedback
  std::vector<ChatMessage> transcript;
  std::string generation;
  bool satisfied = false;
  bool errored = false;
  std::string error;
  json report;  // serialized EvalReport, empty when errored
  double seconds = 0.0;
  std::string model;
  double temperature = 0.7;
};

struct RunOptions {
  int trials = 1;
  double temperature = 0.7;
  int rounds = 1;
  int max_parallel = 1;
  int max_tokens = 1024;
  /// Called under a lock as each record lands, for crash-safe streaming.
  std::function<void(const GenerationRecord&)> on_record;
};

struct RunResults {
  std::vector<GenerationRecord> records;  // sorted by (instance, trial, round)
  std::size_t errored_trials = 0;
  std::size_t requests = 0;
  /// Set when the run stopped early because the endpoint looked dead
  /// (a long unbroken streak of failed calls). Records gathered so far
  /// are kept.
  bool aborted = false;
};

/// One instruction prompt per trial, judged independently. Failed calls are
/// recorded as errored trials and excluded from metric denominators.
RunResults run_zero_shot(const Dataset& dataset, ModelClient& client,
                         const RunOptions& options);

/// Round 1 is zero-shot; each later round appends the previous generation
/// and its rendered feedback to the transcript and asks again. An instance
/// stops as soon as it satisfies its spec.
RunResults run_feedback_rounds(const Dataset& dataset, ModelClient& client,
                               const RunOptions& options);

json record_to_json(const GenerationRecord& record);
GenerationRecord record_from_json(const json& value);
void write_records(const std::vector<GenerationRecord>& records, std::ostream& out);
std::vector<GenerationRecord> read_records(std::istream& in);

// --- Offline clients -------------------------------------------------------

/// Replays each instance's corpus example, keyed by instruction prompt.
std::unique_ptr<ModelClient> make_echo_ground_truth_client(const Dataset& dataset);

/// Always returns the same (violating) text; the default empty string fails
/// every structure's generation-level check.
std::unique_ptr<ModelClient> make_constant_violator_client(std::string text = "");

/// Returns a deliberately broken generation first, then the ground truth,
/// but only once the latest feedback message names a measured value of the
/// broken generation. Exercises the feedback loop end to end.
std::unique_ptr<ModelClient> make_scripted_feedback_client(const Dataset& dataset);

/// Wraps a live client and appends every request/response pair to a JSONL
/// cassette file for later offline replay.
std::unique_ptr<ModelClient> make_recording_client(ModelClient& inner,
                                                   const std::filesystem::path& cassette);

/// Serves completions from a recorded cassette; requests with no recorded
/// response fail. Consumes duplicate recordings in order.
std::unique_ptr<ModelClient> make_replay_client(const std::filesystem::path& cassette,
                                                std::string model_name = "replay");

/// Counts completions served; wrap any client to assert request budgets.
class CountingClient : public ModelClient {
 public:
  explicit CountingClient(ModelClient& inner) : inner_(inner) {}
  std::string model_name() const override { return inner_.model_name(); }
  CompletionResult complete(const CompletionRequest& request) override {
    ++count_;
    return inner_.complete(request);
  }
  std::size_t count() const { return count_; }

 private:
  ModelClient& inner_;
  std::size_t count_ = 0;
};

}  // namespace collie
