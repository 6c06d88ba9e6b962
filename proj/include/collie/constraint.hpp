#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "collie/levels.hpp"

namespace collie {

/// One slicing step: take the index-th unit at `level` of the current text.
/// Indices are 1-based; negative indices count from the end (-1 = last).
struct SliceStep {
  Level level;
  std::int64_t index;

  bool operator==(const SliceStep&) const = default;
};

/// Selects a piece of the generated text. An empty step list denotes the
/// whole generation; steps apply left to right, each slicing the previous
/// result into a smaller unit. Inside a for-all body the root denotes the
/// bound unit instead of the whole generation.
class TextSelector {
 public:
  TextSelector() = default;

  static TextSelector whole() { return TextSelector{}; }

  /// Returns a copy of this selector extended by one slicing step.
  [[nodiscard]] TextSelector sliced(Level level, std::int64_t index) const {
    TextSelector out = *this;
    out.steps_.push_back(SliceStep{level, index});
    return out;
  }

  const std::vector<SliceStep>& steps() const { return steps_; }
  bool is_whole() const { return steps_.empty(); }

  bool operator==(const TextSelector&) const = default;

 private:
  std::vector<SliceStep> steps_;
};

/// Bounds how often a particular string occurs at some level of the
/// selected text (e.g. the word "happy" appears at most 3 times).
struct CountString {
  TextSelector selector;
  Level level = Level::Word;
  std::string target;
  NumberRelation rel = NumberRelation::Eq;
  std::int64_t bound = 0;

  bool operator==(const CountString&) const = default;
};

/// Bounds the number of `level` units inside every `per_unit` unit of the
/// selected text (e.g. each sentence has at least 15 words).
struct CountUnits {
  TextSelector selector;
  Level level = Level::Char;
  Level per_unit = Level::Word;
  NumberRelation rel = NumberRelation::Eq;
  std::int64_t bound = 0;

  bool operator==(const CountUnits&) const = default;
};

/// Compares the unit at a 1-based (or negative, from the end) position of
/// the selected text against a target string.
struct Position {
  TextSelector selector;
  Level level = Level::Word;
  std::int64_t index = 1;
  StringRelation rel = StringRelation::Eq;
  std::string target;

  bool operator==(const Position&) const = default;
};

using BaseConstraint = std::variant<CountString, CountUnits, Position>;

const TextSelector& selector_of(const BaseConstraint& atom);

/// Logical composition of base constraints. And/Or nodes are n-ary with at
/// least one child; a ForAll node holds one body that is checked once per
/// unit of the generated text at the given level, with the body's selector
/// root bound to that unit.
class ConstraintNode {
 public:
  enum class Kind { Atom, And, Or, ForAll };

  /// Default: an atom holding a default CountString; factories below build
  /// every meaningful shape.
  ConstraintNode() = default;

  static ConstraintNode atom(BaseConstraint a);
  static ConstraintNode all_of(std::vector<ConstraintNode> children);
  static ConstraintNode any_of(std::vector<ConstraintNode> children);
  static ConstraintNode for_each_unit(Level unit, ConstraintNode body);

  Kind kind() const { return kind_; }
  bool is_atom() const { return kind_ == Kind::Atom; }

  const BaseConstraint& as_atom() const { return atom_; }

  /// And/Or children; for ForAll the single element is the body.
  const std::vector<ConstraintNode>& children() const { return children_; }
  const ConstraintNode& body() const { return children_.front(); }
  Level unit() const { return unit_; }

  /// Number of base constraints in the subtree (ForAll body counted once).
  std::size_t atom_count() const;

  /// Pre-order visit of every base constraint in the subtree.
  void for_each_atom(const std::function<void(const BaseConstraint&)>& fn) const;

  bool operator==(const ConstraintNode& other) const;

 private:
  Kind kind_ = Kind::Atom;
  BaseConstraint atom_;
  std::vector<ConstraintNode> children_;
  Level unit_ = Level::Word;
};

/// A complete specification: the level of text to generate plus the logical
/// constraint tree it must satisfy.
struct ConstraintSpec {
  Level gen_level = Level::Sentence;
  ConstraintNode body;

  bool operator==(const ConstraintSpec&) const = default;
};

}  // namespace collie
