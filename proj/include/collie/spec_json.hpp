#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "collie/constraint.hpp"
#include "collie/json.hpp"

namespace collie {

/// Raised when a constraint document cannot be parsed. The message carries
/// the byte position (syntax errors) or the document path (semantic errors).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& message) : std::runtime_error(message) {}
};

json selector_to_json(const TextSelector& selector);
json node_to_json(const ConstraintNode& node);
json spec_to_json(const ConstraintSpec& spec);

TextSelector selector_from_json(const json& value, const std::string& path = "$");
ConstraintNode node_from_json(const json& value, const std::string& path = "$");
ConstraintSpec spec_from_json(const json& value);

/// Canonical document form: compact JSON with fixed key order.
std::string serialize(const ConstraintSpec& spec);
ConstraintSpec parse_spec(std::string_view document);

}  // namespace collie
