#include "collie/structures.hpp"

#include <algorithm>
#include <fstream>

#include "collie/resources.hpp"
#include "collie/spec_json.hpp"
#include "collie/validate.hpp"

namespace collie {

namespace {

[[noreturn]] void fail(const std::string& message) { throw InstantiateError(message); }

SlotType slot_type_from_string(const std::string& token) {
  if (token == "int") return SlotType::Int;
  if (token == "string") return SlotType::String;
  if (token == "string_list") return SlotType::StringList;
  if (token == "position_map") return SlotType::PositionMap;
  fail("unknown slot type \"" + token + "\"");
}

std::int64_t parse_map_key(const std::string& key) {
  try {
    std::size_t used = 0;
    std::int64_t value = std::stoll(key, &used);
    if (used != key.size()) fail("position map key \"" + key + "\" is not an integer");
    return value;
  } catch (const std::exception&) {
    fail("position map key \"" + key + "\" is not an integer");
  }
}

void check_target_type(const SlotSpec& slot, const json& value) {
  switch (slot.type) {
    case SlotType::Int:
      if (!value.is_number_integer())
        fail("target \"" + slot.name + "\" must be an integer");
      return;
    case SlotType::String:
      if (!value.is_string() || value.get<std::string>().empty())
        fail("target \"" + slot.name + "\" must be a non-empty string");
      return;
    case SlotType::StringList:
      if (!value.is_array() || value.empty())
        fail("target \"" + slot.name + "\" must be a non-empty array of strings");
      for (const auto& item : value)
        if (!item.is_string() || item.get<std::string>().empty())
          fail("target \"" + slot.name + "\" must contain non-empty strings");
      return;
    case SlotType::PositionMap:
      if (!value.is_object() || value.empty())
        fail("target \"" + slot.name + "\" must be a non-empty map of position to string");
      for (const auto& [key, item] : value.items()) {
        if (parse_map_key(key) == 0) fail("target \"" + slot.name + "\" has position 0");
        if (!item.is_string() || item.get<std::string>().empty())
          fail("target \"" + slot.name + "\" must map positions to non-empty strings");
      }
      return;
  }
}

struct LoopContext {
  std::int64_t key = 0;
  json value;
  std::int64_t ordinal = 0;
};

// Ordered (key, value, ordinal) traversal of a list or position-map slot.
std::vector<LoopContext> loop_entries(const json& container, const std::string& slot) {
  std::vector<LoopContext> out;
  if (container.is_array()) {
    std::int64_t ordinal = 0;
    for (const auto& item : container) {
      ++ordinal;
      out.push_back(LoopContext{ordinal, item, ordinal});
    }
    return out;
  }
  if (container.is_object()) {
    for (const auto& [key, item] : container.items())
      out.push_back(LoopContext{parse_map_key(key), item, 0});
    std::sort(out.begin(), out.end(),
              [](const LoopContext& a, const LoopContext& b) { return a.key < b.key; });
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i].ordinal = static_cast<std::int64_t>(i) + 1;
    return out;
  }
  fail("target \"" + slot + "\" is not iterable");
}

const json& lookup(const json& targets, const json& name_value) {
  if (!name_value.is_string()) fail("slot reference must name a slot");
  std::string name = name_value.get<std::string>();
  auto it = targets.find(name);
  if (it == targets.end()) fail("missing target \"" + name + "\"");
  return *it;
}

json expand(const json& tmpl, const json& targets, const LoopContext* ctx) {
  if (tmpl.is_object()) {
    if (auto it = tmpl.find("$"); it != tmpl.end()) return lookup(targets, *it);
    if (auto it = tmpl.find("$size"); it != tmpl.end()) {
      const json& container = lookup(targets, *it);
      if (!container.is_array() && !container.is_object())
        fail("$size requires a list or map target");
      return static_cast<std::int64_t>(container.size());
    }
    if (tmpl.contains("$key") || tmpl.contains("$value") || tmpl.contains("$ordinal")) {
      if (ctx == nullptr) fail("loop placeholder used outside $foreach");
      if (tmpl.contains("$key")) return ctx->key;
      if (tmpl.contains("$value")) return ctx->value;
      return ctx->ordinal;
    }
    json out = json::object();
    for (const auto& [key, value] : tmpl.items()) out[key] = expand(value, targets, ctx);
    return out;
  }
  if (tmpl.is_array()) {
    json out = json::array();
    for (const auto& element : tmpl) {
      if (element.is_object() && element.contains("$foreach")) {
        const json& name = element.at("$foreach");
        if (!name.is_string()) fail("$foreach must name a slot");
        const json& container = lookup(targets, name);
        auto body = element.find("body");
        if (body == element.end()) fail("$foreach is missing its body");
        for (const LoopContext& entry : loop_entries(container, name.get<std::string>()))
          out.push_back(expand(*body, targets, &entry));
      } else {
        out.push_back(expand(element, targets, ctx));
      }
    }
    return out;
  }
  return tmpl;
}

}  // namespace

StructureTemplate::StructureTemplate(std::string id, Level gen_level,
                                     std::vector<SlotSpec> slots, json constraint_template,
                                     json extract_spec)
    : id_(std::move(id)),
      gen_level_(gen_level),
      slots_(std::move(slots)),
      constraint_template_(std::move(constraint_template)),
      extract_spec_(std::move(extract_spec)) {}

const SlotSpec* StructureTemplate::find_slot(std::string_view name) const {
  for (const SlotSpec& slot : slots_) {
    if (slot.name == name) return &slot;
  }
  return nullptr;
}

const StructureRegistry& StructureRegistry::builtin() {
  static const StructureRegistry registry = [] {
    StructureRegistry r;
    r.load(json::parse(resources::structures_json));
    return r;
  }();
  return registry;
}

void StructureRegistry::add(const json& structure) {
  if (!structure.is_object()) fail("structure entry must be an object");
  auto id_it = structure.find("id");
  if (id_it == structure.end() || !id_it->is_string() || id_it->get<std::string>().empty())
    fail("structure entry needs a non-empty \"id\"");
  std::string id = id_it->get<std::string>();
  if (index_.count(id) > 0) fail("duplicate structure id \"" + id + "\"");

  auto level_it = structure.find("level");
  if (level_it == structure.end() || !level_it->is_string())
    fail("structure \"" + id + "\" needs a \"level\"");
  auto level = level_from_string(level_it->get<std::string>());
  if (!level) fail("structure \"" + id + "\" has unknown level");

  std::vector<SlotSpec> slots;
  if (auto slots_it = structure.find("slots"); slots_it != structure.end()) {
    if (!slots_it->is_object()) fail("structure \"" + id + "\" slots must be an object");
    for (const auto& [name, spec] : slots_it->items()) {
      if (!spec.is_object() || !spec.contains("type") || !spec.at("type").is_string())
        fail("slot \"" + name + "\" needs a \"type\"");
      slots.push_back(SlotSpec{name, slot_type_from_string(spec.at("type").get<std::string>())});
    }
  }

  auto constraint_it = structure.find("constraint");
  if (constraint_it == structure.end())
    fail("structure \"" + id + "\" needs a \"constraint\" template");

  json extract = json::array();
  if (auto it = structure.find("extract"); it != structure.end()) {
    if (!it->is_array()) fail("structure \"" + id + "\" extract block must be an array");
    extract = *it;
  }

  index_[id] = templates_.size();
  templates_.emplace_back(std::move(id), *level, std::move(slots), *constraint_it,
                          std::move(extract));
}

void StructureRegistry::load(const json& file) {
  if (!file.is_object() || !file.contains("structures") || !file.at("structures").is_array())
    fail("structure file needs a \"structures\" array");
  for (const auto& entry : file.at("structures")) add(entry);
}

void StructureRegistry::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read structure file: " + path.string());
  json file;
  try {
    file = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("structure file: ") + e.what());
  }
  load(file);
}

const StructureTemplate* StructureRegistry::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &templates_[it->second];
}

std::vector<std::string> StructureRegistry::ids() const {
  std::vector<std::string> out;
  out.reserve(templates_.size());
  for (const auto& tmpl : templates_) out.push_back(tmpl.id());
  return out;
}

ConstraintSpec instantiate(const StructureTemplate& tmpl, const json& targets) {
  if (!targets.is_object()) fail("targets must be a JSON object");
  for (const SlotSpec& slot : tmpl.slots()) {
    auto it = targets.find(slot.name);
    if (it == targets.end())
      fail("structure \"" + tmpl.id() + "\": missing target \"" + slot.name + "\"");
    check_target_type(slot, *it);
  }
  for (const auto& [key, value] : targets.items()) {
    (void)value;
    if (tmpl.find_slot(key) == nullptr)
      fail("structure \"" + tmpl.id() + "\": unknown target \"" + key + "\"");
  }

  json doc;
  doc["level"] = to_string(tmpl.gen_level());
  doc["constraint"] = expand(tmpl.constraint_template(), targets, nullptr);

  ConstraintSpec spec;
  try {
    spec = spec_from_json(doc);
  } catch (const ParseError& e) {
    fail("structure \"" + tmpl.id() + "\": bad template or targets: " + e.what());
  }
  auto violations = validate(spec);
  if (!violations.empty()) {
    std::string message =
        "structure \"" + tmpl.id() + "\": instantiated spec is ill-formed:";
    for (const Violation& v : violations) message += " [" + v.path + "] " + v.message + ";";
    fail(message);
  }
  return spec;
}

ConstraintSpec instantiate(std::string_view structure_id, const json& targets) {
  const StructureTemplate* tmpl = StructureRegistry::builtin().find(structure_id);
  if (tmpl == nullptr)
    fail("unknown structure id \"" + std::string(structure_id) + "\"");
  return instantiate(*tmpl, targets);
}

}  // namespace collie
