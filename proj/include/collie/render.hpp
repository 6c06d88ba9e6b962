#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "collie/constraint.hpp"
#include "collie/eval.hpp"
#include "collie/json.hpp"

namespace collie {

/// Phrase tables for instruction and feedback rendering. Loaded from a
/// versioned resource file so wording changes stay diffable.
class RenderRules {
 public:
  static const RenderRules& builtin();
  static RenderRules load_file(const std::filesystem::path& path);
  static RenderRules parse(std::string_view text);

  int version() const { return version_; }
  std::string pattern(std::string_view name) const;
  std::string relation_phrase(NumberRelation rel) const;
  std::string directive(std::string_view name) const;
  std::string prefix(std::string_view name) const;
  /// "last", "second-to-last", ... for negative indices.
  std::string negative_ordinal(std::int64_t index) const;

 private:
  explicit RenderRules(json data);
  json data_;
  int version_ = 0;
};

/// Deterministic natural-language instruction for a well-formed spec.
std::string render_instruction(const ConstraintSpec& spec);
std::string render_instruction(const ConstraintSpec& spec, const RenderRules& rules);

/// Natural-language feedback: a restatement of the task followed by the
/// observed values of every unsatisfied atom.
std::string render_feedback(const EvalReport& report);
std::string render_feedback(const EvalReport& report, const RenderRules& rules);

/// Optional language-model rewrite of rendered text. Returns the reply, or
/// the input unchanged when no client is configured or the call fails.
using PolishClient = std::function<std::optional<std::string>(std::string_view prompt)>;
std::string polish_hook(std::string_view text, const PolishClient& client);

}  // namespace collie
