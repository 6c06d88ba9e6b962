#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "collie/constraint.hpp"
#include "collie/json.hpp"

namespace collie {

struct InstantiateError : std::runtime_error {
  explicit InstantiateError(const std::string& message) : std::runtime_error(message) {}
};

enum class SlotType { Int, String, StringList, PositionMap };

struct SlotSpec {
  std::string name;
  SlotType type;
};

/// A named family of constraint specifications that differ only in their
/// values. The constraint tree is stored as a document template whose value
/// slots are filled by instantiate(); the extraction block describes how a
/// corpus miner derives those values from real text.
class StructureTemplate {
 public:
  StructureTemplate(std::string id, Level gen_level, std::vector<SlotSpec> slots,
                    json constraint_template, json extract_spec);

  const std::string& id() const { return id_; }
  Level gen_level() const { return gen_level_; }
  const std::vector<SlotSpec>& slots() const { return slots_; }
  const SlotSpec* find_slot(std::string_view name) const;
  const json& constraint_template() const { return constraint_template_; }
  const json& extract_spec() const { return extract_spec_; }

 private:
  std::string id_;
  Level gen_level_;
  std::vector<SlotSpec> slots_;
  json constraint_template_;
  json extract_spec_;
};

/// Registry of structure templates. The built-in registry holds the
/// thirteen shipped structures; more can be registered from files at
/// runtime without touching code.
class StructureRegistry {
 public:
  StructureRegistry() = default;

  static const StructureRegistry& builtin();

  void add(const json& structure);
  void load(const json& file);
  void load_file(const std::filesystem::path& path);

  const StructureTemplate* find(std::string_view id) const;
  std::vector<std::string> ids() const;
  std::size_t size() const { return templates_.size(); }

 private:
  std::vector<StructureTemplate> templates_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Fills every slot of the template from `targets` and returns the concrete,
/// well-formed spec. Missing targets, unknown targets, type mismatches, and
/// values that break the grammar's level rules are all rejected.
ConstraintSpec instantiate(const StructureTemplate& tmpl, const json& targets);

/// Convenience lookup in the built-in registry.
ConstraintSpec instantiate(std::string_view structure_id, const json& targets);

}  // namespace collie
