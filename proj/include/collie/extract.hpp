#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "collie/constraint.hpp"
#include "collie/corpus.hpp"
#include "collie/json.hpp"
#include "collie/structures.hpp"

namespace collie {

struct ExtractError : std::runtime_error {
  explicit ExtractError(const std::string& message) : std::runtime_error(message) {}
};

/// Extraction tuning; `range_overrides` replaces a template slot's
/// admissible range: {"sent01": {"chars": [40, 200]}}.
struct ExtractOptions {
  json range_overrides = json::object();
};

/// Mines target values for one structure from one chunk. Direct slots are
/// measured from the text; sweep slots multiply the result. Every returned
/// target set instantiates to a spec the chunk itself satisfies.
std::vector<json> extract_targets(const StructureTemplate& tmpl, const Chunk& chunk,
                                  std::uint64_t seed,
                                  const ExtractOptions& options = ExtractOptions{});

struct Caps {
  std::size_t docs_per_source = 300;
  std::size_t chunks_per_doc = 100;
  std::size_t targets_per_structure_per_source = 100;
};

struct ConstraintInstance {
  std::string id;
  std::string structure;
  std::string source;
  ConstraintSpec spec;
  json targets;
  std::string example;  // corpus text the targets were mined from
  std::string prompt;   // rendered instruction
};

struct DatasetMeta {
  std::uint64_t seed = 0;
  Caps caps;
  std::string tool_version;
  /// (source name, fnv1a64 hex of the input bytes) pairs.
  std::vector<std::pair<std::string, std::string>> input_digests;
};

struct Dataset {
  DatasetMeta meta;
  std::vector<ConstraintInstance> instances;
};

/// One extraction input: either a text corpus with its source config, or a
/// word list (word_list = true) for the word-level structures.
struct SourceSpec {
  SourceConfig config;
  std::filesystem::path path;
  bool word_list = false;
};

/// Runs the full pipeline: load and sample documents, chunk, extract, cap,
/// deduplicate, and render prompts. Deterministic for a fixed seed.
Dataset assemble_dataset(const std::vector<SourceSpec>& sources,
                         const StructureRegistry& registry,
                         const std::vector<std::string>& structure_ids, const Caps& caps,
                         std::uint64_t seed,
                         const ExtractOptions& options = ExtractOptions{});

void write_dataset(const Dataset& dataset, std::ostream& out);
void write_dataset_file(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::filesystem::path& path);

}  // namespace collie
