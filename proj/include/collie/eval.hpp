#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "collie/constraint.hpp"
#include "collie/json.hpp"
#include "collie/segment.hpp"

namespace collie {

/// Measurement extracted while judging one atom: a count, a list of
/// per-unit counts, the unit found at a position, or nothing (absent).
using ActualValue =
    std::variant<std::monostate, std::int64_t, std::string, std::vector<std::int64_t>>;

struct AtomVerdict {
  /// The judged atom; empty for the generation-level structure check.
  std::optional<BaseConstraint> atom;
  bool satisfied = false;
  ActualValue actual;
  std::string detail;
};

struct EvalReport {
  bool overall = false;
  bool level_ok = false;
  /// Structure check first, then every atom in pre-order. Atoms are never
  /// short-circuited so feedback can name every discrepancy.
  std::vector<AtomVerdict> verdicts;
  ConstraintSpec spec;
  std::string text;  // the cleaned generation that was judged
};

/// Strips surrounding whitespace and one or more layers of surrounding
/// matched quotes. Nothing else is altered.
std::string preclean_generation(std::string_view raw);

struct SelectedText {
  std::string text;
  Level level;
};

/// Applies slice steps starting from the whole root text; absent as soon as
/// any index falls out of range.
std::optional<SelectedText> resolve_selector(const TextSelector& selector,
                                             std::string_view root_text, Level root_level);

AtomVerdict eval_count_string(const CountString& atom, std::string_view root_text,
                              Level root_level);
AtomVerdict eval_count_units(const CountUnits& atom, std::string_view root_text,
                             Level root_level);
AtomVerdict eval_position(const Position& atom, std::string_view root_text,
                          Level root_level);
AtomVerdict eval_atom(const BaseConstraint& atom, std::string_view root_text,
                      Level root_level);

/// Judges a generation against a spec: cleans it, checks that it is
/// structurally one unit of the generation level, then evaluates the whole
/// constraint tree.
EvalReport check(const ConstraintSpec& spec, std::string_view generation);

json actual_to_json(const ActualValue& value);
json report_to_json(const EvalReport& report);

}  // namespace collie
