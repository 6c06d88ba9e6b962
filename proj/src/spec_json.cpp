#include "collie/spec_json.hpp"

#include <utility>

namespace collie {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ParseError(path + ": " + message);
}

const json& require_key(const json& value, const char* key, const std::string& path) {
  auto it = value.find(key);
  if (it == value.end()) fail(path, std::string("missing key \"") + key + "\"");
  return *it;
}

std::string require_string(const json& value, const char* key, const std::string& path) {
  const json& v = require_key(value, key, path);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::int64_t require_int(const json& value, const char* key, const std::string& path) {
  const json& v = require_key(value, key, path);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

Level require_level(const json& value, const char* key, const std::string& path) {
  std::string token = require_string(value, key, path);
  auto level = level_from_string(token);
  if (!level) fail(path + "." + key, "unknown level token \"" + token + "\"");
  return *level;
}

}  // namespace

json selector_to_json(const TextSelector& selector) {
  json out = "xi";
  for (const SliceStep& step : selector.steps()) {
    json wrapped;
    wrapped["slice"] = json::array({std::move(out), to_string(step.level), step.index});
    out = std::move(wrapped);
  }
  return out;
}

TextSelector selector_from_json(const json& value, const std::string& path) {
  if (value.is_string()) {
    if (value.get<std::string>() != "xi")
      fail(path, "unknown selector token \"" + value.get<std::string>() + "\"");
    return TextSelector::whole();
  }
  if (!value.is_object()) fail(path, "selector must be \"xi\" or a slice object");
  const json& slice = require_key(value, "slice", path);
  if (!slice.is_array() || slice.size() != 3)
    fail(path + ".slice", "expected [selector, level, index]");
  TextSelector inner = selector_from_json(slice[0], path + ".slice[0]");
  if (!slice[1].is_string()) fail(path + ".slice[1]", "expected a level string");
  auto level = level_from_string(slice[1].get<std::string>());
  if (!level)
    fail(path + ".slice[1]", "unknown level token \"" + slice[1].get<std::string>() + "\"");
  if (!slice[2].is_number_integer()) fail(path + ".slice[2]", "expected an integer index");
  return inner.sliced(*level, slice[2].get<std::int64_t>());
}

namespace {

json atom_to_json(const BaseConstraint& atom) {
  json out;
  if (const auto* c = std::get_if<CountString>(&atom)) {
    out["op"] = "count_string";
    out["selector"] = selector_to_json(c->selector);
    out["level"] = to_string(c->level);
    out["target"] = c->target;
    out["rel"] = to_string(c->rel);
    out["bound"] = c->bound;
  } else if (const auto* c = std::get_if<CountUnits>(&atom)) {
    out["op"] = "count_units";
    out["selector"] = selector_to_json(c->selector);
    out["level"] = to_string(c->level);
    out["per_unit"] = to_string(c->per_unit);
    out["rel"] = to_string(c->rel);
    out["bound"] = c->bound;
  } else {
    const auto& p = std::get<Position>(atom);
    out["op"] = "position";
    out["selector"] = selector_to_json(p.selector);
    out["level"] = to_string(p.level);
    out["index"] = p.index;
    out["rel"] = to_string(p.rel);
    out["target"] = p.target;
  }
  return out;
}

}  // namespace

json node_to_json(const ConstraintNode& node) {
  switch (node.kind()) {
    case ConstraintNode::Kind::Atom:
      return atom_to_json(node.as_atom());
    case ConstraintNode::Kind::And:
    case ConstraintNode::Kind::Or: {
      json out;
      out["op"] = node.kind() == ConstraintNode::Kind::And ? "and" : "or";
      json args = json::array();
      for (const auto& child : node.children()) args.push_back(node_to_json(child));
      out["args"] = std::move(args);
      return out;
    }
    case ConstraintNode::Kind::ForAll: {
      json out;
      out["op"] = "forall";
      out["unit"] = to_string(node.unit());
      out["body"] = node_to_json(node.body());
      return out;
    }
  }
  return {};
}

ConstraintNode node_from_json(const json& value, const std::string& path) {
  if (!value.is_object()) fail(path, "expected a constraint object");
  std::string op = require_string(value, "op", path);

  if (op == "and" || op == "or") {
    const json& args = require_key(value, "args", path);
    if (!args.is_array() || args.empty())
      fail(path + ".args", "expected a non-empty array");
    std::vector<ConstraintNode> children;
    children.reserve(args.size());
    for (std::size_t i = 0; i < args.size(); ++i)
      children.push_back(node_from_json(args[i], path + ".args[" + std::to_string(i) + "]"));
    return op == "and" ? ConstraintNode::all_of(std::move(children))
                       : ConstraintNode::any_of(std::move(children));
  }
  if (op == "forall") {
    Level unit = require_level(value, "unit", path);
    ConstraintNode body = node_from_json(require_key(value, "body", path), path + ".body");
    return ConstraintNode::for_each_unit(unit, std::move(body));
  }
  if (op == "count_string") {
    CountString atom;
    atom.selector = selector_from_json(require_key(value, "selector", path), path + ".selector");
    atom.level = require_level(value, "level", path);
    atom.target = require_string(value, "target", path);
    auto rel = number_relation_from_string(require_string(value, "rel", path));
    if (!rel) fail(path + ".rel", "unknown relation token");
    atom.rel = *rel;
    atom.bound = require_int(value, "bound", path);
    return ConstraintNode::atom(std::move(atom));
  }
  if (op == "count_units") {
    CountUnits atom;
    atom.selector = selector_from_json(require_key(value, "selector", path), path + ".selector");
    atom.level = require_level(value, "level", path);
    atom.per_unit = require_level(value, "per_unit", path);
    auto rel = number_relation_from_string(require_string(value, "rel", path));
    if (!rel) fail(path + ".rel", "unknown relation token");
    atom.rel = *rel;
    atom.bound = require_int(value, "bound", path);
    return ConstraintNode::atom(std::move(atom));
  }
  if (op == "position") {
    Position atom;
    atom.selector = selector_from_json(require_key(value, "selector", path), path + ".selector");
    atom.level = require_level(value, "level", path);
    atom.index = require_int(value, "index", path);
    auto rel = string_relation_from_string(require_string(value, "rel", path));
    if (!rel) fail(path + ".rel", "unknown relation token (position takes eq or neq)");
    atom.rel = *rel;
    atom.target = require_string(value, "target", path);
    return ConstraintNode::atom(std::move(atom));
  }
  fail(path + ".op", "unknown op \"" + op + "\"");
}

json spec_to_json(const ConstraintSpec& spec) {
  json out;
  out["level"] = to_string(spec.gen_level);
  out["constraint"] = node_to_json(spec.body);
  return out;
}

ConstraintSpec spec_from_json(const json& value) {
  if (!value.is_object()) fail("$", "expected a document object");
  ConstraintSpec spec;
  spec.gen_level = require_level(value, "level", "$");
  spec.body = node_from_json(require_key(value, "constraint", "$"), "$.constraint");
  return spec;
}

std::string serialize(const ConstraintSpec& spec) { return spec_to_json(spec).dump(); }

ConstraintSpec parse_spec(std::string_view document) {
  json value;
  try {
    value = json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  return spec_from_json(value);
}

}  // namespace collie
