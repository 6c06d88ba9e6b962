#include "collie/render.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include "collie/resources.hpp"

namespace collie {

namespace {

std::string fmt(std::string pattern,
                std::initializer_list<std::pair<std::string_view, std::string>> subs) {
  for (const auto& [key, value] : subs) {
    std::string token = "{";
    token += key;
    token += "}";
    std::size_t pos = 0;
    while ((pos = pattern.find(token, pos)) != std::string::npos) {
      pattern.replace(pos, token.size(), value);
      pos += value.size();
    }
  }
  return pattern;
}

std::string squote(std::string_view s) { return "'" + std::string(s) + "'"; }

std::string join_list(const std::vector<std::string>& items, std::string_view last_sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? std::string(last_sep) : ", ";
    out += items[i];
  }
  return out;
}

std::string positive_ordinal(std::int64_t n) {
  std::string s = std::to_string(n);
  std::int64_t mod100 = n % 100;
  std::int64_t mod10 = n % 10;
  if (mod100 >= 11 && mod100 <= 13) return s + "th";
  if (mod10 == 1) return s + "st";
  if (mod10 == 2) return s + "nd";
  if (mod10 == 3) return s + "rd";
  return s + "th";
}

std::string_view unit_noun(Level level) {
  return level == Level::Char ? std::string_view("character") : to_string(level);
}

std::string_view position_noun(Level level) {
  return level == Level::Char ? std::string_view("letter") : to_string(level);
}

// How a fragment attaches to the sentence under construction.
enum class FragKind { With, WherePos, EndAnd, Exclude, Include, Forall };

struct Fragment {
  FragKind kind = FragKind::With;
  std::string text;
  std::string cls;  // adjacent same-class With fragments join with a bare "and"
  Level pos_level = Level::Char;
};

struct RenderState {
  const RenderRules& rules;
  Level gen_level;
  std::vector<Fragment> fragments;
  std::vector<std::string> directives;

  void add_directive(const std::string& text) {
    if (std::find(directives.begin(), directives.end(), text) == directives.end())
      directives.push_back(text);
  }
};

std::string describe_selector(const TextSelector& selector, const RenderRules& rules) {
  std::string desc;
  for (const SliceStep& step : selector.steps()) {
    std::string ord = step.index > 0 ? positive_ordinal(step.index)
                                     : rules.negative_ordinal(step.index);
    std::string part = "the " + ord + " " + std::string(unit_noun(step.level));
    desc = desc.empty() ? part : part + " of " + desc;
  }
  return desc;
}

void fragment_for_count_string(const CountString& atom, RenderState& state) {
  const RenderRules& rules = state.rules;
  std::string rel = rules.relation_phrase(atom.rel);
  if (atom.level == Level::Char) {
    state.fragments.push_back(
        Fragment{FragKind::With,
                 fmt(rules.pattern("char_count_string"),
                     {{"rel", rel}, {"n", std::to_string(atom.bound)}, {"t", atom.target}}),
                 "char_count"});
    return;
  }
  state.fragments.push_back(Fragment{
      FragKind::With,
      fmt(rules.pattern("count_string_generic"),
          {{"unit", std::string(unit_noun(atom.level))},
           {"t", atom.target},
           {"rel", rel},
           {"n", std::to_string(atom.bound)}}),
      "count_generic"});
}

void fragment_for_count_units(const CountUnits& atom, RenderState& state) {
  const RenderRules& rules = state.rules;
  std::string rel = rules.relation_phrase(atom.rel);
  std::string n = std::to_string(atom.bound);
  Fragment frag;
  frag.kind = FragKind::With;

  if (atom.level == Level::Char && atom.per_unit == Level::Word) {
    if (state.gen_level == Level::Word) {
      frag.text = atom.rel == NumberRelation::Eq
                      ? fmt(rules.pattern("letters_eq"), {{"n", n}})
                      : fmt(rules.pattern("letters_rel"), {{"rel", rel}, {"n", n}});
      frag.cls = "letters";
    } else {
      frag.text = fmt(rules.pattern("chars_per_word_each"), {{"rel", rel}, {"n", n}});
      frag.cls = "each_word";
    }
  } else if (atom.level == Level::Char) {
    frag.text = fmt(rules.pattern("chars_per_unit"), {{"rel", rel}, {"n", n}});
    frag.cls = "chars";
    if (atom.per_unit == Level::Sentence)
      state.add_directive(rules.directive("char_per_sentence"));
  } else if (atom.level == Level::Word && atom.per_unit == Level::Sentence &&
             state.gen_level > Level::Sentence) {
    frag.text = fmt(rules.pattern("words_each"), {{"rel", rel}, {"n", n}});
    frag.cls = "each";
  } else if (atom.level == Level::Word) {
    frag.text = atom.rel == NumberRelation::Eq
                    ? fmt(rules.pattern("words_per_unit_eq"), {{"n", n}})
                    : fmt(rules.pattern("words_per_unit_rel"), {{"rel", rel}, {"n", n}});
    frag.cls = "words";
  } else {
    frag.text = fmt(rules.pattern("units_rel"),
                    {{"rel", rel}, {"n", n}, {"unit", std::string(unit_noun(atom.level))}});
    frag.cls = "units";
  }
  if (!atom.selector.is_whole())
    frag.text = describe_selector(atom.selector, rules) + " has " + frag.text;
  state.fragments.push_back(std::move(frag));
}

void fragment_for_position(const Position& atom, RenderState& state) {
  const RenderRules& rules = state.rules;
  bool negated = atom.rel == StringRelation::Neq;
  std::string target = squote(atom.target);
  std::string index = std::to_string(atom.index);

  if (atom.selector.is_whole()) {
    if (atom.level == Level::Char && atom.index > 0) {
      state.fragments.push_back(Fragment{
          FragKind::WherePos,
          fmt(rules.pattern(negated ? "pos_char_not" : "pos_char"),
              {{"i", index}, {"t", atom.target}}),
          "pos_char", Level::Char});
      return;
    }
    if (atom.level == Level::Char && atom.index == -1) {
      state.fragments.push_back(Fragment{
          FragKind::EndAnd,
          fmt(rules.pattern(negated ? "pos_char_last_not" : "pos_char_last"),
              {{"t", atom.target}}),
          "pos_end", Level::Char});
      return;
    }
    if (atom.level == Level::Word && atom.index > 0) {
      state.fragments.push_back(Fragment{
          FragKind::WherePos,
          fmt(rules.pattern(negated ? "pos_word_not" : "pos_word"),
              {{"i", index}, {"t", atom.target}}),
          "pos_word", Level::Word});
      return;
    }
    if (atom.index == -1) {
      state.fragments.push_back(Fragment{
          FragKind::EndAnd,
          fmt(rules.pattern(negated ? "pos_unit_last_not" : "pos_unit_last"),
              {{"unit", std::string(position_noun(atom.level))}, {"t", atom.target}}),
          "pos_end", atom.level});
      return;
    }
    // Remaining whole-selector shapes: negative (not -1) or positive
    // positions at sentence level and above.
    std::string ord = atom.index > 0 ? positive_ordinal(atom.index)
                                     : rules.negative_ordinal(atom.index);
    state.fragments.push_back(Fragment{
        atom.index > 0 ? FragKind::WherePos : FragKind::EndAnd,
        fmt(rules.pattern(negated ? "pos_unit_ordinal_not" : "pos_unit_ordinal"),
            {{"ord", ord}, {"unit", std::string(position_noun(atom.level))}, {"t", target}}),
        "pos_ord", atom.level});
    return;
  }

  std::string desc = describe_selector(atom.selector, rules);
  if (atom.index == -1) {
    state.fragments.push_back(Fragment{
        FragKind::EndAnd,
        desc + " " +
            fmt(rules.pattern(negated ? "pos_unit_last_not" : "pos_unit_last"),
                {{"unit", std::string(position_noun(atom.level))}, {"t", atom.target}}),
        "pos_sliced", atom.level});
    return;
  }
  std::string base =
      atom.level == Level::Char
          ? fmt(rules.pattern(negated ? "pos_char_not" : "pos_char"),
                {{"i", index}, {"t", atom.target}})
          : fmt(rules.pattern(negated ? "pos_word_not" : "pos_word"),
                {{"i", index}, {"t", atom.target}});
  state.fragments.push_back(
      Fragment{FragKind::WherePos, base + " in " + desc, "pos_sliced", atom.level});
}

void fragments_for_node(const ConstraintNode& node, RenderState& state);

// A count of units paired with one trailing position constraint per unit
// renders as a single "... that end in ... respectively" clause.
bool try_respectively_merge(const std::vector<const ConstraintNode*>& atoms,
                            std::vector<bool>& consumed, std::size_t count_idx,
                            RenderState& state) {
  const auto* count = std::get_if<CountUnits>(&atoms[count_idx]->as_atom());
  if (count == nullptr || count->rel != NumberRelation::Eq || !count->selector.is_whole())
    return false;
  if (count->level != Level::Sentence && count->level != Level::Paragraph) return false;
  std::int64_t n = count->bound;
  if (n < 2) return false;

  std::vector<std::string> targets(static_cast<std::size_t>(n));
  std::vector<std::size_t> matched;
  Level inner = Level::Char;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (consumed[i] || i == count_idx) continue;
    const auto* pos = std::get_if<Position>(&atoms[i]->as_atom());
    if (pos == nullptr || pos->index != -1 || pos->rel != StringRelation::Eq) continue;
    const auto& steps = pos->selector.steps();
    if (steps.size() != 1 || steps[0].level != count->level) continue;
    std::int64_t k = steps[0].index;
    if (k < 1 || k > n) continue;
    if (!targets[static_cast<std::size_t>(k - 1)].empty()) return false;
    if (!matched.empty() && pos->level != inner) return false;
    inner = pos->level;
    targets[static_cast<std::size_t>(k - 1)] = pos->target;
    matched.push_back(i);
  }
  if (matched.size() != static_cast<std::size_t>(n)) return false;

  std::vector<std::string> quoted_targets;
  quoted_targets.reserve(targets.size());
  for (const auto& t : targets) quoted_targets.push_back(squote(t));
  std::string pattern_name = count->level == Level::Sentence
                                 ? "sentences_end_respectively"
                                 : "paragraphs_end_respectively";
  state.fragments.push_back(Fragment{
      FragKind::With,
      fmt(state.rules.pattern(pattern_name),
          {{"n", std::to_string(n)},
           {"unit", std::string(unit_noun(count->level))},
           {"list", join_list(quoted_targets, " and ")}}),
      "respectively"});
  consumed[count_idx] = true;
  for (std::size_t i : matched) consumed[i] = true;
  return true;
}

// A lower and an upper bound on words per sentence render as one
// "each with between a and b words" clause.
bool try_between_merge(const std::vector<const ConstraintNode*>& atoms,
                       std::vector<bool>& consumed, std::size_t lo_idx,
                       RenderState& state) {
  const auto* lo = std::get_if<CountUnits>(&atoms[lo_idx]->as_atom());
  if (lo == nullptr || lo->rel != NumberRelation::Ge || lo->level != Level::Word ||
      lo->per_unit != Level::Sentence || !lo->selector.is_whole() ||
      state.gen_level <= Level::Sentence)
    return false;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (consumed[i] || i == lo_idx) continue;
    const auto* hi = std::get_if<CountUnits>(&atoms[i]->as_atom());
    if (hi == nullptr || hi->rel != NumberRelation::Le || hi->level != lo->level ||
        hi->per_unit != lo->per_unit || !hi->selector.is_whole())
      continue;
    if (hi->bound < lo->bound) continue;
    state.fragments.push_back(Fragment{
        FragKind::With,
        fmt(state.rules.pattern("words_each_between"),
            {{"a", std::to_string(lo->bound)}, {"b", std::to_string(hi->bound)}}),
        "each"});
    consumed[lo_idx] = true;
    consumed[i] = true;
    return true;
  }
  return false;
}

void fragments_for_conjunction(const std::vector<const ConstraintNode*>& parts,
                               RenderState& state) {
  std::vector<bool> consumed(parts.size(), false);

  // Word inclusion/exclusion groups collapse into a single list each.
  std::vector<std::string> include_words, exclude_words;
  std::size_t include_at = parts.size(), exclude_at = parts.size();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!parts[i]->is_atom()) continue;
    const auto* c = std::get_if<CountString>(&parts[i]->as_atom());
    if (c == nullptr || c->level != Level::Word || !c->selector.is_whole()) continue;
    if (c->rel == NumberRelation::Gt && c->bound == 0) {
      include_words.push_back(squote(c->target));
      include_at = std::min(include_at, i);
      consumed[i] = true;
    } else if (c->rel == NumberRelation::Eq && c->bound == 0) {
      exclude_words.push_back(squote(c->target));
      exclude_at = std::min(exclude_at, i);
      consumed[i] = true;
    }
  }

  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i == include_at && !include_words.empty()) {
      state.fragments.push_back(Fragment{
          FragKind::Include,
          fmt(state.rules.pattern("include_words"),
              {{"list", join_list(include_words, " and ")}}),
          "include"});
    }
    if (i == exclude_at && !exclude_words.empty()) {
      state.fragments.push_back(Fragment{
          FragKind::Exclude,
          fmt(state.rules.pattern("exclude_words"),
              {{"list", join_list(exclude_words, " or ")}}),
          "exclude"});
    }
    if (consumed[i]) continue;
    if (parts[i]->is_atom()) {
      if (try_respectively_merge(parts, consumed, i, state)) continue;
      if (try_between_merge(parts, consumed, i, state)) continue;
      consumed[i] = true;
      const BaseConstraint& atom = parts[i]->as_atom();
      if (const auto* c = std::get_if<CountString>(&atom)) {
        fragment_for_count_string(*c, state);
      } else if (const auto* c = std::get_if<CountUnits>(&atom)) {
        fragment_for_count_units(*c, state);
      } else {
        fragment_for_position(std::get<Position>(atom), state);
      }
    } else {
      consumed[i] = true;
      fragments_for_node(*parts[i], state);
    }
  }
}

std::string assemble_fragments(const std::vector<Fragment>& fragments);

void fragments_for_node(const ConstraintNode& node, RenderState& state) {
  switch (node.kind()) {
    case ConstraintNode::Kind::Atom: {
      std::vector<const ConstraintNode*> one{&node};
      fragments_for_conjunction(one, state);
      return;
    }
    case ConstraintNode::Kind::And: {
      // Flatten nested conjunctions so grouping sees every sibling.
      std::vector<const ConstraintNode*> parts;
      std::function<void(const ConstraintNode&)> flatten = [&](const ConstraintNode& n) {
        if (n.kind() == ConstraintNode::Kind::And) {
          for (const auto& child : n.children()) flatten(child);
        } else {
          parts.push_back(&n);
        }
      };
      flatten(node);
      fragments_for_conjunction(parts, state);
      return;
    }
    case ConstraintNode::Kind::Or: {
      std::vector<std::string> alternatives;
      for (const auto& child : node.children()) {
        RenderState sub{state.rules, state.gen_level, {}, {}};
        fragments_for_node(child, sub);
        alternatives.push_back(assemble_fragments(sub.fragments));
        for (const auto& d : sub.directives) state.add_directive(d);
      }
      state.fragments.push_back(
          Fragment{FragKind::With, join_list(alternatives, ", or "), "or"});
      return;
    }
    case ConstraintNode::Kind::ForAll: {
      const ConstraintNode& body = node.body();
      if (body.is_atom()) {
        if (const auto* pos = std::get_if<Position>(&body.as_atom());
            pos != nullptr && pos->selector.is_whole() && pos->level == Level::Word &&
            pos->index == 1) {
          state.fragments.push_back(Fragment{
              FragKind::Forall,
              fmt(state.rules.pattern(pos->rel == StringRelation::Eq ? "forall_begins"
                                                                     : "forall_begins_not"),
                  {{"unit", std::string(unit_noun(node.unit()))}, {"t", pos->target}}),
              "forall"});
          return;
        }
      }
      RenderState sub{state.rules, node.unit(), {}, {}};
      fragments_for_node(body, sub);
      for (const auto& d : sub.directives) state.add_directive(d);
      state.fragments.push_back(Fragment{
          FragKind::Forall,
          fmt(state.rules.pattern("forall_generic"),
              {{"unit", std::string(unit_noun(node.unit()))},
               {"body", assemble_fragments(sub.fragments)}}),
          "forall"});
      return;
    }
  }
}

// Joins fragments without the "Please generate a <level>" head; used for
// Or-alternatives and for-all bodies.
std::string assemble_fragments(const std::vector<Fragment>& fragments) {
  std::string out;
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    if (i > 0) out += " and ";
    out += fragments[i].text;
  }
  return out;
}

std::string assemble_instruction(Level gen_level, const std::vector<Fragment>& fragments,
                                 const std::vector<std::string>& directives,
                                 const std::string& prefix, bool with_directives) {
  std::string out = prefix + std::string(to_string(gen_level));
  const Fragment* prev = nullptr;
  for (const Fragment& frag : fragments) {
    switch (frag.kind) {
      case FragKind::With:
        if (prev == nullptr) {
          out += " with ";
        } else if (prev->kind == FragKind::With) {
          if (frag.text.starts_with("each with")) {
            out += ", ";
          } else if (frag.cls == prev->cls) {
            out += " and ";
          } else {
            out += ", and ";
          }
        } else {
          out += ", and ";
        }
        break;
      case FragKind::WherePos:
        if (prev != nullptr && prev->kind == FragKind::WherePos) {
          out += frag.pos_level == Level::Char ? ", " : " and ";
        } else if (prev == nullptr) {
          out += " where ";
        } else {
          out += ", where ";
        }
        break;
      case FragKind::EndAnd:
        out += prev == nullptr ? " that " : " and ";
        break;
      case FragKind::Include:
      case FragKind::Exclude:
        out += prev == nullptr ? " but " : ", but ";
        break;
      case FragKind::Forall:
        out += prev == nullptr ? " " : ", ";
        break;
    }
    out += frag.text;
    prev = &frag;
  }
  out += ".";
  if (with_directives) {
    for (const std::string& d : directives) {
      out += " ";
      out += d;
    }
  }
  return out;
}

std::string render_instruction_impl(const ConstraintSpec& spec, const RenderRules& rules,
                                    const std::string& prefix, bool with_directives) {
  RenderState state{rules, spec.gen_level, {}, {}};
  fragments_for_node(spec.body, state);
  if (spec.gen_level == Level::Passage && with_directives)
    state.add_directive(rules.directive("passage_format"));
  return assemble_instruction(spec.gen_level, state.fragments, state.directives, prefix,
                              with_directives);
}

}  // namespace

RenderRules::RenderRules(json data) : data_(std::move(data)) {
  version_ = data_.value("version", 0);
}

const RenderRules& RenderRules::builtin() {
  static const RenderRules rules = parse(resources::render_rules_json);
  return rules;
}

RenderRules RenderRules::parse(std::string_view text) {
  return RenderRules(json::parse(text));
}

RenderRules RenderRules::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read render rules: " + path.string());
  json data;
  in >> data;
  return RenderRules(std::move(data));
}

std::string RenderRules::pattern(std::string_view name) const {
  const auto& patterns = data_.at("patterns");
  auto it = patterns.find(name);
  if (it == patterns.end())
    throw std::runtime_error("render rules: missing pattern \"" + std::string(name) + "\"");
  return it->get<std::string>();
}

std::string RenderRules::relation_phrase(NumberRelation rel) const {
  return data_.at("relation_phrases").at(std::string(to_string(rel))).get<std::string>();
}

std::string RenderRules::directive(std::string_view name) const {
  return data_.at("directives").at(std::string(name)).get<std::string>();
}

std::string RenderRules::prefix(std::string_view name) const {
  return data_.at(std::string(name)).get<std::string>();
}

std::string RenderRules::negative_ordinal(std::int64_t index) const {
  const auto& ordinals = data_.at("ordinals");
  auto it = ordinals.find(std::to_string(index));
  if (it != ordinals.end()) return it->get<std::string>();
  return std::to_string(-index) + "th-to-last";
}

std::string render_instruction(const ConstraintSpec& spec) {
  return render_instruction(spec, RenderRules::builtin());
}

std::string render_instruction(const ConstraintSpec& spec, const RenderRules& rules) {
  return render_instruction_impl(spec, rules, rules.prefix("instruction_prefix"), true);
}

namespace {

struct FeedbackParts {
  std::vector<std::string> with;
  std::vector<std::string> where;
  std::vector<std::string> without;
  std::vector<std::string> only;
};

std::string count_list(const std::vector<std::int64_t>& counts) {
  std::vector<std::string> items;
  items.reserve(counts.size());
  for (std::int64_t n : counts) items.push_back(std::to_string(n));
  return join_list(items, " and ");
}

void feedback_for_verdict(const AtomVerdict& verdict, const EvalReport& report,
                          const RenderRules& rules, FeedbackParts& parts) {
  const BaseConstraint& atom = *verdict.atom;
  if (const auto* c = std::get_if<CountString>(&atom)) {
    std::int64_t n = std::holds_alternative<std::int64_t>(verdict.actual)
                         ? std::get<std::int64_t>(verdict.actual)
                         : 0;
    if (c->level == Level::Char) {
      parts.with.push_back(fmt(rules.pattern("feedback_char_count"),
                               {{"n", std::to_string(n)}, {"t", c->target}}));
    } else if (n == 0) {
      parts.without.push_back(
          fmt(rules.pattern("feedback_without"), {{"t", c->target}}));
    } else {
      parts.with.push_back(fmt(rules.pattern("feedback_word_count"),
                               {{"t", c->target}, {"n", std::to_string(n)}}));
    }
    return;
  }
  if (const auto* c = std::get_if<CountUnits>(&atom)) {
    const auto* counts = std::get_if<std::vector<std::int64_t>>(&verdict.actual);
    if (counts == nullptr || counts->empty()) return;
    if (counts->size() == 1) {
      std::string n = std::to_string(counts->front());
      if (c->level == Level::Char && c->per_unit == Level::Word &&
          report.spec.gen_level == Level::Word) {
        parts.with.push_back(fmt(rules.pattern("feedback_letters"), {{"n", n}}));
      } else if (c->level == Level::Char) {
        parts.with.push_back(fmt(rules.pattern("feedback_chars"), {{"n", n}}));
      } else if (c->level == Level::Word) {
        parts.with.push_back(fmt(rules.pattern("feedback_words"), {{"n", n}}));
      } else {
        parts.with.push_back(
            fmt(rules.pattern("feedback_units"),
                {{"n", n}, {"unit", std::string(unit_noun(c->level))}}));
      }
    } else {
      parts.with.push_back(
          fmt(rules.pattern("feedback_units_list"),
              {{"unit", std::string(unit_noun(c->per_unit))},
               {"list", count_list(*counts)},
               {"inner", std::string(position_noun(c->level))}}));
    }
    return;
  }
  const auto& p = std::get<Position>(atom);
  if (const auto* actual = std::get_if<std::string>(&verdict.actual)) {
    if (p.level == Level::Char && p.index > 0) {
      parts.where.push_back(fmt(rules.pattern("feedback_pos_char"),
                                {{"i", std::to_string(p.index)}, {"a", *actual}}));
    } else if (p.level == Level::Word && p.index > 0) {
      parts.where.push_back(fmt(rules.pattern("feedback_pos_word"),
                                {{"i", std::to_string(p.index)}, {"a", *actual}}));
    } else {
      std::string ord = p.index > 0 ? positive_ordinal(p.index)
                                    : rules.negative_ordinal(p.index);
      std::string phrase = fmt(rules.pattern("feedback_pos_unit"),
                               {{"ord", ord},
                                {"unit", std::string(position_noun(p.level))},
                                {"a", *actual}});
      if (!p.selector.is_whole())
        phrase += " of " + describe_selector(p.selector, rules);
      parts.where.push_back(std::move(phrase));
    }
    return;
  }
  // Absent unit: report how many units the selected text actually has.
  auto selected = resolve_selector(p.selector, report.text, report.spec.gen_level);
  if (selected) {
    std::size_t n = segment_units(selected->text, p.level).size();
    std::string noun = p.selector.is_whole()
                           ? std::string(to_string(report.spec.gen_level))
                           : describe_selector(p.selector, rules);
    parts.only.push_back("your " + noun + " has " +
                         fmt(rules.pattern("feedback_missing_unit"),
                             {{"n", std::to_string(n)},
                              {"unit", std::string(position_noun(p.level))}}));
  } else {
    parts.only.push_back("your " + std::string(to_string(report.spec.gen_level)) +
                         " has no " + describe_selector(p.selector, rules));
  }
}

}  // namespace

std::string render_feedback(const EvalReport& report) {
  return render_feedback(report, RenderRules::builtin());
}

std::string render_feedback(const EvalReport& report, const RenderRules& rules) {
  if (report.overall) return rules.prefix("feedback_satisfied");

  std::string restatement = render_instruction_impl(
      report.spec, rules, rules.prefix("feedback_task_prefix"), false);

  const std::string level_noun(to_string(report.spec.gen_level));
  if (!report.level_ok) {
    const AtomVerdict& level_verdict = report.verdicts.front();
    std::int64_t n = std::holds_alternative<std::int64_t>(level_verdict.actual)
                         ? std::get<std::int64_t>(level_verdict.actual)
                         : 0;
    std::string clause =
        report.spec.gen_level == Level::Passage
            ? fmt(rules.pattern("feedback_level_passage"), {{"n", std::to_string(n)}})
            : fmt(rules.pattern("feedback_level"),
                  {{"n", std::to_string(n)},
                   {"unit",
                    std::string(report.spec.gen_level == Level::Word
                                    ? "word token"
                                    : to_string(report.spec.gen_level))},
                   {"level", level_noun}});
    return restatement + " However, you generate " + clause + ".";
  }

  FeedbackParts parts;
  for (const AtomVerdict& verdict : report.verdicts) {
    if (verdict.satisfied || !verdict.atom.has_value()) continue;
    feedback_for_verdict(verdict, report, rules, parts);
  }

  std::string out = restatement + " " + rules.prefix("feedback_contrast_prefix") + level_noun;
  bool described = false;
  if (!parts.with.empty()) {
    out += " with " + join_list(parts.with, " and ");
    described = true;
  }
  if (!parts.where.empty()) {
    out += described ? ", where " : " where ";
    out += join_list(parts.where, " and ");
    described = true;
  }
  if (!parts.without.empty()) {
    out += described ? " and " : " ";
    out += join_list(parts.without, " and ");
    described = true;
  }
  if (!parts.only.empty()) {
    out += described ? ", but " : " but ";
    out += join_list(parts.only, " and ");
  }
  out += ".";
  return out;
}

std::string polish_hook(std::string_view text, const PolishClient& client) {
  if (!client) return std::string(text);
  std::string prompt =
      "Please rewrite the following paragraph to improve fluency without altering the "
      "original meaning. You should provide the revised paragraph directly. Original "
      "paragraph: " +
      std::string(text);
  std::optional<std::string> reply;
  try {
    reply = client(prompt);
  } catch (...) {
    return std::string(text);
  }
  if (!reply || trim(*reply).empty()) return std::string(text);
  return *reply;
}

}  // namespace collie
