#include "collie/validate.hpp"

#include <optional>
#include <string>

namespace collie {

namespace {

struct Checker {
  std::vector<Violation> violations;

  void report(const std::string& path, std::string message) {
    violations.push_back(Violation{path, std::move(message)});
  }

  // Level of the text the selector yields, starting from `root`, or nullopt
  // if the slice levels do not strictly decrease.
  std::optional<Level> selector_level(const TextSelector& selector, Level root,
                                      const std::string& path) {
    Level current = root;
    bool ok = true;
    for (const SliceStep& step : selector.steps()) {
      if (step.index == 0) {
        report(path, "slice index must be nonzero");
        ok = false;
      }
      if (!(step.level < current)) {
        report(path, std::string("selector slices ") + std::string(to_string(current)) +
                         "-level text into " + std::string(to_string(step.level)) +
                         "-level units; levels must strictly decrease");
        ok = false;
      }
      current = step.level;
    }
    if (!ok) return std::nullopt;
    return current;
  }

  void check_atom(const BaseConstraint& atom, Level root, const std::string& path) {
    if (const auto* c = std::get_if<CountString>(&atom)) {
      auto text_level = selector_level(c->selector, root, path);
      if (text_level && *text_level < c->level)
        report(path, std::string("count level ") + std::string(to_string(c->level)) +
                         " is above the selected text level " +
                         std::string(to_string(*text_level)));
      if (c->target.empty()) report(path, "count target string is empty");
      if (c->bound < 0) report(path, "count bound is negative");
    } else if (const auto* c = std::get_if<CountUnits>(&atom)) {
      auto text_level = selector_level(c->selector, root, path);
      if (!(c->level < c->per_unit))
        report(path, std::string("count level ") + std::string(to_string(c->level)) +
                         " must be strictly below the per-unit level " +
                         std::string(to_string(c->per_unit)));
      if (text_level && *text_level < c->per_unit)
        report(path, std::string("per-unit level ") + std::string(to_string(c->per_unit)) +
                         " is above the selected text level " +
                         std::string(to_string(*text_level)));
      if (c->bound < 0) report(path, "count bound is negative");
    } else {
      const auto& p = std::get<Position>(atom);
      auto text_level = selector_level(p.selector, root, path);
      if (text_level && !(p.level < *text_level))
        report(path, std::string("position level ") + std::string(to_string(p.level)) +
                         " not below " + std::string(to_string(*text_level)));
      if (p.index == 0) report(path, "position index must be nonzero");
      if (p.target.empty()) report(path, "position target string is empty");
    }
  }

  // `root` is the level selectors resolve against: the generation level, or
  // the bound unit's level inside a for-all body.
  void check_node(const ConstraintNode& node, Level root, const std::string& path) {
    switch (node.kind()) {
      case ConstraintNode::Kind::Atom:
        check_atom(node.as_atom(), root, path);
        return;
      case ConstraintNode::Kind::And:
      case ConstraintNode::Kind::Or: {
        if (node.children().empty()) {
          report(path, "logical node has no children");
          return;
        }
        for (std::size_t i = 0; i < node.children().size(); ++i)
          check_node(node.children()[i], root, path + ".args[" + std::to_string(i) + "]");
        return;
      }
      case ConstraintNode::Kind::ForAll: {
        if (!(node.unit() < root)) {
          report(path, std::string("for-all unit level ") +
                           std::string(to_string(node.unit())) +
                           " must be strictly below the enclosing text level " +
                           std::string(to_string(root)));
        }
        check_node(node.body(), node.unit(), path + ".body");
        return;
      }
    }
  }
};

}  // namespace

std::vector<Violation> validate(const ConstraintSpec& spec) {
  Checker checker;
  checker.check_node(spec.body, spec.gen_level, "$.constraint");
  return checker.violations;
}

}  // namespace collie
