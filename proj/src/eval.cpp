#include "collie/eval.hpp"

#include <utility>

#include "collie/spec_json.hpp"

namespace collie {

namespace {

struct QuotePair {
  std::string_view open;
  std::string_view close;
};

constexpr QuotePair kQuotePairs[] = {
    {"\"", "\""},
    {"'", "'"},
    {"\xE2\x80\x9C", "\xE2\x80\x9D"},  // “ ”
    {"\xE2\x80\x98", "\xE2\x80\x99"},  // ‘ ’
};

std::string join_counts(const std::vector<std::int64_t>& counts) {
  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(counts[i]);
  }
  return out;
}

// 0-based offset for a 1-based (or negative) position among n units.
std::optional<std::size_t> resolve_index(std::int64_t index, std::size_t n) {
  std::int64_t pos = index > 0 ? index - 1 : static_cast<std::int64_t>(n) + index;
  if (pos < 0 || pos >= static_cast<std::int64_t>(n)) return std::nullopt;
  return static_cast<std::size_t>(pos);
}

AtomVerdict out_of_range(BaseConstraint atom) {
  AtomVerdict v;
  v.atom = std::move(atom);
  v.satisfied = false;
  v.detail = "selector out of range";
  return v;
}

}  // namespace

std::string preclean_generation(std::string_view raw) {
  std::string_view text = trim(raw);
  bool stripped = true;
  while (stripped) {
    stripped = false;
    for (const QuotePair& pair : kQuotePairs) {
      if (text.size() >= pair.open.size() + pair.close.size() &&
          text.starts_with(pair.open) && text.ends_with(pair.close)) {
        text = text.substr(pair.open.size(),
                           text.size() - pair.open.size() - pair.close.size());
        text = trim(text);
        stripped = true;
        break;
      }
    }
  }
  return std::string(text);
}

std::optional<SelectedText> resolve_selector(const TextSelector& selector,
                                             std::string_view root_text, Level root_level) {
  std::string current(trim(root_text));
  Level level = root_level;
  for (const SliceStep& step : selector.steps()) {
    auto units = segment_units(current, step.level);
    auto pos = resolve_index(step.index, units.size());
    if (!pos) return std::nullopt;
    current = std::string(units[*pos]);
    level = step.level;
  }
  return SelectedText{std::move(current), level};
}

AtomVerdict eval_count_string(const CountString& atom, std::string_view root_text,
                              Level root_level) {
  auto selected = resolve_selector(atom.selector, root_text, root_level);
  if (!selected) return out_of_range(atom);

  const std::string target = normalize_unit(atom.level, atom.target);
  std::int64_t count = 0;
  for (std::string_view unit : segment_units(selected->text, atom.level)) {
    if (normalize_unit(atom.level, unit) == target) ++count;
  }
  AtomVerdict v;
  v.atom = atom;
  v.actual = count;
  v.satisfied = holds(atom.rel, count, atom.bound);
  v.detail = std::to_string(count) + " " + std::string(to_string(atom.level)) +
             " unit(s) equal to '" + atom.target + "'";
  return v;
}

AtomVerdict eval_count_units(const CountUnits& atom, std::string_view root_text,
                             Level root_level) {
  auto selected = resolve_selector(atom.selector, root_text, root_level);
  if (!selected) return out_of_range(atom);

  std::vector<std::string_view> outer;
  std::string_view whole = selected->text;
  if (selected->level == atom.per_unit) {
    whole = trim(whole);
    if (!whole.empty()) outer.push_back(whole);
  } else {
    outer = segment_units(selected->text, atom.per_unit);
  }

  AtomVerdict v;
  v.atom = atom;
  if (outer.empty()) {
    v.satisfied = true;  // vacuous: nothing to bound
    v.actual = std::vector<std::int64_t>{};
    v.detail = "no units";
    return v;
  }
  std::vector<std::int64_t> counts;
  counts.reserve(outer.size());
  bool all_ok = true;
  for (std::string_view unit : outer) {
    std::int64_t n = atom.level == Level::Char
                         ? count_chars(unit)
                         : static_cast<std::int64_t>(segment_units(unit, atom.level).size());
    all_ok = all_ok && holds(atom.rel, n, atom.bound);
    counts.push_back(n);
  }
  v.satisfied = all_ok;
  v.detail = std::string(to_string(atom.level)) + " count per " +
             std::string(to_string(atom.per_unit)) + ": " + join_counts(counts);
  v.actual = std::move(counts);
  return v;
}

AtomVerdict eval_position(const Position& atom, std::string_view root_text,
                          Level root_level) {
  auto selected = resolve_selector(atom.selector, root_text, root_level);
  if (!selected) return out_of_range(atom);

  auto units = segment_units(selected->text, atom.level);
  auto pos = resolve_index(atom.index, units.size());
  AtomVerdict v;
  v.atom = atom;
  if (!pos) {
    // Absent unit: equality cannot hold, inequality holds trivially.
    v.satisfied = atom.rel == StringRelation::Neq;
    v.detail = "only " + std::to_string(units.size()) + " " +
               std::string(to_string(atom.level)) + " unit(s), position " +
               std::to_string(atom.index) + " is absent";
    return v;
  }
  std::string actual = normalize_unit(atom.level, units[*pos]);
  bool equal = actual == normalize_unit(atom.level, atom.target);
  v.satisfied = holds(atom.rel, equal);
  v.detail = std::string(to_string(atom.level)) + " " + std::to_string(atom.index) +
             " is '" + actual + "'";
  v.actual = std::move(actual);
  return v;
}

AtomVerdict eval_atom(const BaseConstraint& atom, std::string_view root_text,
                      Level root_level) {
  return std::visit(
      [&](const auto& a) -> AtomVerdict {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, CountString>)
          return eval_count_string(a, root_text, root_level);
        else if constexpr (std::is_same_v<T, CountUnits>)
          return eval_count_units(a, root_text, root_level);
        else
          return eval_position(a, root_text, root_level);
      },
      atom);
}

namespace {

bool eval_node(const ConstraintNode& node, std::string_view root_text, Level root_level,
               std::vector<AtomVerdict>& verdicts) {
  switch (node.kind()) {
    case ConstraintNode::Kind::Atom: {
      AtomVerdict v = eval_atom(node.as_atom(), root_text, root_level);
      bool ok = v.satisfied;
      verdicts.push_back(std::move(v));
      return ok;
    }
    case ConstraintNode::Kind::And: {
      bool all = true;
      for (const auto& child : node.children())
        all = eval_node(child, root_text, root_level, verdicts) && all;
      return all;
    }
    case ConstraintNode::Kind::Or: {
      bool any = false;
      for (const auto& child : node.children())
        any = eval_node(child, root_text, root_level, verdicts) || any;
      return any;
    }
    case ConstraintNode::Kind::ForAll: {
      auto units = segment_units(root_text, node.unit());
      bool all = true;
      for (std::size_t k = 0; k < units.size(); ++k) {
        std::size_t before = verdicts.size();
        bool ok = eval_node(node.body(), units[k], node.unit(), verdicts);
        for (std::size_t i = before; i < verdicts.size(); ++i) {
          verdicts[i].detail = std::string(to_string(node.unit())) + " " +
                               std::to_string(k + 1) + ": " + verdicts[i].detail;
        }
        all = all && ok;
      }
      return all;  // vacuously true on zero units
    }
  }
  return false;
}

// A generation must be structurally one unit of its level (a passage being
// at least two paragraphs).
AtomVerdict check_generation_level(const SegmentedText& text) {
  AtomVerdict v;
  std::int64_t observed = 0;
  switch (text.level()) {
    case Level::Char:
      observed = count_chars(text.raw());
      v.satisfied = observed == 1;
      v.detail = "generation has " + std::to_string(observed) + " character(s)";
      break;
    case Level::Word:
      observed = text.unit_count(Level::Word);
      v.satisfied = observed == 1;
      v.detail = "generation has " + std::to_string(observed) + " word token(s)";
      break;
    case Level::Sentence: {
      observed = text.unit_count(Level::Sentence);
      std::int64_t paragraphs = text.unit_count(Level::Paragraph);
      v.satisfied = observed == 1 && paragraphs == 1;
      v.detail = "generation has " + std::to_string(observed) + " sentence(s) in " +
                 std::to_string(paragraphs) + " paragraph(s)";
      break;
    }
    case Level::Paragraph:
      observed = text.unit_count(Level::Paragraph);
      v.satisfied = observed == 1;
      v.detail = "generation has " + std::to_string(observed) + " paragraph(s)";
      break;
    case Level::Passage:
      observed = text.unit_count(Level::Paragraph);
      v.satisfied = observed >= 2;
      v.detail = "generation has " + std::to_string(observed) +
                 " paragraph(s); a passage needs at least 2";
      break;
  }
  v.actual = observed;
  return v;
}

}  // namespace

EvalReport check(const ConstraintSpec& spec, std::string_view generation) {
  EvalReport report;
  report.spec = spec;
  report.text = preclean_generation(generation);

  SegmentedText text(report.text, spec.gen_level);
  AtomVerdict level_verdict = check_generation_level(text);
  report.level_ok = level_verdict.satisfied;
  report.verdicts.push_back(std::move(level_verdict));

  bool body_ok = eval_node(spec.body, report.text, spec.gen_level, report.verdicts);
  report.overall = report.level_ok && body_ok;
  return report;
}

json actual_to_json(const ActualValue& value) {
  if (std::holds_alternative<std::monostate>(value)) return nullptr;
  if (const auto* n = std::get_if<std::int64_t>(&value)) return *n;
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  return std::get<std::vector<std::int64_t>>(value);
}

json report_to_json(const EvalReport& report) {
  json out;
  out["overall"] = report.overall;
  out["level_ok"] = report.level_ok;
  json verdicts = json::array();
  for (const AtomVerdict& v : report.verdicts) {
    json jv;
    jv["atom"] = v.atom ? node_to_json(ConstraintNode::atom(*v.atom)) : json(nullptr);
    jv["satisfied"] = v.satisfied;
    jv["actual"] = actual_to_json(v.actual);
    jv["detail"] = v.detail;
    verdicts.push_back(std::move(jv));
  }
  out["verdicts"] = std::move(verdicts);
  out["spec"] = spec_to_json(report.spec);
  out["text"] = report.text;
  return out;
}

}  // namespace collie
