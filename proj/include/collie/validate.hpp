#pragma once

#include <string>
#include <vector>

#include "collie/constraint.hpp"

namespace collie {

/// A well-formedness violation; `path` locates the offending node in the
/// constraint tree ("$.constraint.args[1]" style).
struct Violation {
  std::string path;
  std::string message;
};

/// Collects every invariant violation: level ordering of selectors and
/// atoms, zero indices, empty targets, negative bounds, empty logical
/// nodes. An empty result means the spec is well-formed.
std::vector<Violation> validate(const ConstraintSpec& spec);

inline bool is_valid(const ConstraintSpec& spec) { return validate(spec).empty(); }

}  // namespace collie
