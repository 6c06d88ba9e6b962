#include "collie/constraint.hpp"

#include <utility>

namespace collie {

std::optional<Level> level_from_string(std::string_view token) {
  for (Level level : kAllLevels) {
    if (to_string(level) == token) return level;
  }
  return std::nullopt;
}

std::optional<StringRelation> string_relation_from_string(std::string_view token) {
  if (token == "eq") return StringRelation::Eq;
  if (token == "neq") return StringRelation::Neq;
  return std::nullopt;
}

std::optional<NumberRelation> number_relation_from_string(std::string_view token) {
  if (token == "eq") return NumberRelation::Eq;
  if (token == "neq") return NumberRelation::Neq;
  if (token == "gt") return NumberRelation::Gt;
  if (token == "lt") return NumberRelation::Lt;
  if (token == "le") return NumberRelation::Le;
  if (token == "ge") return NumberRelation::Ge;
  return std::nullopt;
}

const TextSelector& selector_of(const BaseConstraint& atom) {
  return std::visit([](const auto& a) -> const TextSelector& { return a.selector; }, atom);
}

ConstraintNode ConstraintNode::atom(BaseConstraint a) {
  ConstraintNode node;
  node.kind_ = Kind::Atom;
  node.atom_ = std::move(a);
  return node;
}

ConstraintNode ConstraintNode::all_of(std::vector<ConstraintNode> children) {
  ConstraintNode node;
  node.kind_ = Kind::And;
  node.children_ = std::move(children);
  return node;
}

ConstraintNode ConstraintNode::any_of(std::vector<ConstraintNode> children) {
  ConstraintNode node;
  node.kind_ = Kind::Or;
  node.children_ = std::move(children);
  return node;
}

ConstraintNode ConstraintNode::for_each_unit(Level unit, ConstraintNode body) {
  ConstraintNode node;
  node.kind_ = Kind::ForAll;
  node.unit_ = unit;
  node.children_.push_back(std::move(body));
  return node;
}

std::size_t ConstraintNode::atom_count() const {
  if (kind_ == Kind::Atom) return 1;
  std::size_t n = 0;
  for (const auto& child : children_) n += child.atom_count();
  return n;
}

void ConstraintNode::for_each_atom(
    const std::function<void(const BaseConstraint&)>& fn) const {
  if (kind_ == Kind::Atom) {
    fn(atom_);
    return;
  }
  for (const auto& child : children_) child.for_each_atom(fn);
}

bool ConstraintNode::operator==(const ConstraintNode& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::Atom:
      return atom_ == other.atom_;
    case Kind::ForAll:
      if (unit_ != other.unit_) return false;
      [[fallthrough]];
    case Kind::And:
    case Kind::Or:
      return children_ == other.children_;
  }
  return false;
}

}  // namespace collie
