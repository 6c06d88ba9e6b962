#include "collie/extract.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "collie/eval.hpp"
#include "collie/render.hpp"
#include "collie/resources.hpp"
#include "collie/rng.hpp"
#include "collie/spec_json.hpp"
#include "collie/version.hpp"

namespace collie {

namespace {

const std::unordered_set<std::string>& stopword_set() {
  static const std::unordered_set<std::string> words = [] {
    std::unordered_set<std::string> set;
    std::string_view text = resources::stopwords_txt;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      std::string_view line = text.substr(
          pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      line = trim(line);
      if (!line.empty()) set.emplace(line);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    return set;
  }();
  return words;
}

bool is_boundary_alnum(unsigned char c) {
  return c >= 0x80 || std::isalnum(c) != 0;
}

// Target strings may not begin or end with a non-alphanumeric character.
// Sentence-level targets are exempt: their terminal punctuation is part of
// the unit itself.
bool boundary_ok(const std::string& target, Level level) {
  if (target.empty()) return false;
  if (level >= Level::Sentence) return true;
  return is_boundary_alnum(static_cast<unsigned char>(target.front())) &&
         is_boundary_alnum(static_cast<unsigned char>(target.back()));
}

struct Range {
  std::int64_t lo = std::numeric_limits<std::int64_t>::min();
  std::int64_t hi = std::numeric_limits<std::int64_t>::max();

  bool contains(std::int64_t v) const { return v >= lo && v <= hi; }
};

Range parse_range(const json& value) {
  Range range;
  if (value.is_null()) return range;
  if (!value.is_array() || value.size() != 2)
    throw ExtractError("range must be [lo, hi] with null for an open end");
  if (!value[0].is_null()) range.lo = value[0].get<std::int64_t>();
  if (!value[1].is_null()) range.hi = value[1].get<std::int64_t>();
  return range;
}

Range slot_range(const json& op, const std::string& structure_id,
                 const ExtractOptions& options) {
  std::string slot = op.at("slot").get<std::string>();
  if (auto s = options.range_overrides.find(structure_id);
      s != options.range_overrides.end()) {
    if (auto r = s->find(slot); r != s->end()) return parse_range(*r);
  }
  if (auto it = op.find("range"); it != op.end()) return parse_range(*it);
  return Range{};
}

Level level_arg(const json& op, const char* key) {
  auto level = level_from_string(op.at(key).get<std::string>());
  if (!level) throw ExtractError(std::string("extract op: unknown level in \"") + key + "\"");
  return *level;
}

// Per-unit counts of `level` units inside each `per` unit of the chunk.
std::vector<std::int64_t> measure_counts(const Chunk& chunk, Level level, Level per) {
  std::vector<std::string_view> outer;
  std::string_view whole = trim(chunk.text);
  if (per == chunk.level) {
    if (!whole.empty()) outer.push_back(whole);
  } else {
    outer = segment_units(chunk.text, per);
  }
  std::vector<std::int64_t> counts;
  counts.reserve(outer.size());
  for (std::string_view unit : outer) {
    counts.push_back(level == Level::Char
                         ? count_chars(unit)
                         : static_cast<std::int64_t>(segment_units(unit, level).size()));
  }
  return counts;
}

// Fills one slot; returns false when the chunk does not admit a value.
bool run_direct_op(const json& op, const Chunk& chunk, const std::string& structure_id,
                   const ExtractOptions& options, DeterministicRng& rng, json& targets) {
  const std::string kind = op.at("op").get<std::string>();
  const std::string slot = op.at("slot").get<std::string>();

  if (kind == "count") {
    Level level = level_arg(op, "level");
    Level per = level_arg(op, "per");
    Range range = slot_range(op, structure_id, options);
    auto counts = measure_counts(chunk, level, per);
    if (counts.empty()) return false;
    for (std::int64_t n : counts) {
      if (!range.contains(n)) return false;
    }
    std::string agg = op.value("agg", std::string("eq"));
    std::int64_t value = 0;
    if (agg == "eq") {
      value = counts.front();
      for (std::int64_t n : counts) {
        if (n != value) return false;
      }
    } else if (agg == "min") {
      value = *std::min_element(counts.begin(), counts.end());
    } else if (agg == "max") {
      value = *std::max_element(counts.begin(), counts.end());
    } else {
      throw ExtractError("extract op: unknown agg \"" + agg + "\"");
    }
    targets[slot] = value;
    return true;
  }

  if (kind == "sample_positions") {
    Level level = level_arg(op, "level");
    auto units = segment_units(chunk.text, level);
    std::size_t want = op.value("count", 1);
    std::vector<std::int64_t> excluded;
    if (auto it = op.find("exclude"); it != op.end())
      for (const auto& e : *it) excluded.push_back(e.get<std::int64_t>());

    std::vector<std::int64_t> candidates;
    for (std::size_t i = 1; i <= units.size(); ++i) {
      auto pos = static_cast<std::int64_t>(i);
      if (std::find(excluded.begin(), excluded.end(), pos) != excluded.end()) continue;
      std::string value = normalize_unit(level, units[i - 1]);
      if (boundary_ok(value, level)) candidates.push_back(pos);
    }
    if (candidates.size() < want) return false;
    auto picks = rng.sample_indices(candidates.size(), want);
    std::vector<std::int64_t> positions;
    positions.reserve(want);
    for (std::size_t p : picks) positions.push_back(candidates[p]);
    std::sort(positions.begin(), positions.end());

    json map = json::object();
    for (std::int64_t pos : positions) {
      map[std::to_string(pos)] =
          normalize_unit(level, units[static_cast<std::size_t>(pos - 1)]);
    }
    targets[slot] = std::move(map);
    return true;
  }

  if (kind == "unit_at") {
    Level level = level_arg(op, "level");
    std::int64_t index = op.at("index").get<std::int64_t>();
    auto units = segment_units(chunk.text, level);
    std::int64_t pos =
        index > 0 ? index - 1 : static_cast<std::int64_t>(units.size()) + index;
    if (pos < 0 || pos >= static_cast<std::int64_t>(units.size())) return false;
    std::string value = normalize_unit(level, units[static_cast<std::size_t>(pos)]);
    if (!boundary_ok(value, level)) return false;
    targets[slot] = std::move(value);
    return true;
  }

  if (kind == "sample_units") {
    Level level = level_arg(op, "level");
    std::size_t want = op.value("count", 1);
    bool skip_stopwords = op.value("exclude_stopwords", false);
    std::vector<std::string> candidates;
    std::unordered_set<std::string> seen;
    for (std::string_view unit : segment_units(chunk.text, level)) {
      std::string value = normalize_unit(level, unit);
      if (!boundary_ok(value, level)) continue;
      if (skip_stopwords && stopword_set().count(value) > 0) continue;
      if (seen.insert(value).second) candidates.push_back(std::move(value));
    }
    if (candidates.size() < want) return false;
    auto picks = rng.sample_indices(candidates.size(), want);
    std::sort(picks.begin(), picks.end());  // keep text order
    json list = json::array();
    for (std::size_t p : picks) list.push_back(candidates[p]);
    targets[slot] = std::move(list);
    return true;
  }

  if (kind == "shared_first_word") {
    Level unit = level_arg(op, "unit");
    std::size_t min_units = op.value("min_units", 2);
    auto units = segment_units(chunk.text, unit);
    if (units.size() < min_units) return false;
    std::string shared;
    for (std::string_view u : units) {
      auto words = segment_units(u, Level::Word);
      if (words.empty()) return false;
      std::string first = normalize_word(words.front());
      if (!boundary_ok(first, Level::Word)) return false;
      if (shared.empty()) {
        shared = std::move(first);
      } else if (first != shared) {
        return false;
      }
    }
    targets[slot] = std::move(shared);
    return true;
  }

  if (kind == "last_per_unit") {
    Level unit = level_arg(op, "unit");
    Level level = level_arg(op, "level");
    auto units = segment_units(chunk.text, unit);
    if (auto it = op.find("range_units"); it != op.end()) {
      Range range = parse_range(*it);
      if (!range.contains(static_cast<std::int64_t>(units.size()))) return false;
    }
    if (units.empty()) return false;
    json list = json::array();
    for (std::string_view u : units) {
      auto inner = segment_units(u, level);
      if (inner.empty()) return false;
      std::string value = level >= Level::Sentence ? std::string(trim(inner.back()))
                                                   : normalize_unit(level, inner.back());
      if (!boundary_ok(value, level)) return false;
      list.push_back(std::move(value));
    }
    targets[slot] = std::move(list);
    return true;
  }

  throw ExtractError("extract op: unknown op \"" + kind + "\"");
}

}  // namespace

std::vector<json> extract_targets(const StructureTemplate& tmpl, const Chunk& chunk,
                                  std::uint64_t seed, const ExtractOptions& options) {
  if (chunk.level != tmpl.gen_level()) return {};

  DeterministicRng rng(seed);
  json base = json::object();
  std::vector<std::pair<std::string, json>> sweeps;  // slot -> candidate list

  for (const json& op : tmpl.extract_spec()) {
    const std::string kind = op.at("op").get<std::string>();
    if (kind == "sweep") {
      const json& candidates = op.at("candidates");
      if (!candidates.is_array() || candidates.empty())
        throw ExtractError("structure \"" + tmpl.id() +
                           "\": sweep op needs a non-empty candidate list");
      sweeps.emplace_back(op.at("slot").get<std::string>(), candidates);
      continue;
    }
    if (!run_direct_op(op, chunk, tmpl.id(), options, rng, base)) return {};
  }

  // Cross product of sweep candidates over the directly measured base.
  std::vector<json> combos{base};
  for (const auto& [slot, candidates] : sweeps) {
    std::vector<json> next;
    for (const json& combo : combos) {
      for (const json& candidate : candidates) {
        json extended = combo;
        extended[slot] = candidate;
        next.push_back(std::move(extended));
      }
    }
    combos = std::move(next);
  }

  // Keep only target sets the chunk itself satisfies. Direct extraction
  // passes by construction; sweeps rely on this gate.
  std::vector<json> accepted;
  for (const json& targets : combos) {
    ConstraintSpec spec = instantiate(tmpl, targets);
    if (check(spec, chunk.text).overall) accepted.push_back(targets);
  }
  return accepted;
}

namespace {

struct Candidate {
  json targets;
  std::string example;
};

std::vector<ConstraintInstance> extract_for_structure(
    const StructureTemplate& tmpl, const std::vector<Chunk>& chunks,
    const std::string& source_name, const Caps& caps, std::uint64_t seed,
    const ExtractOptions& options) {
  std::vector<Candidate> candidates;
  std::unordered_set<std::string> seen;  // within-source dedup on targets

  for (const Chunk& chunk : chunks) {
    std::uint64_t chunk_seed = mix_seed(
        mix_seed(mix_seed(seed, chunk.doc_id), std::to_string(chunk.position)), tmpl.id());
    for (json& targets : extract_targets(tmpl, chunk, chunk_seed, options)) {
      std::string key = targets.dump();
      if (!seen.insert(key).second) continue;
      candidates.push_back(Candidate{std::move(targets), chunk.text});
    }
  }

  if (candidates.size() > caps.targets_per_structure_per_source) {
    DeterministicRng rng(mix_seed(mix_seed(seed, tmpl.id()), "target_cap"));
    auto picks =
        rng.sample_indices(candidates.size(), caps.targets_per_structure_per_source);
    std::sort(picks.begin(), picks.end());
    std::vector<Candidate> kept;
    kept.reserve(picks.size());
    for (std::size_t p : picks) kept.push_back(std::move(candidates[p]));
    candidates = std::move(kept);
  }

  std::vector<ConstraintInstance> instances;
  instances.reserve(candidates.size());
  std::size_t counter = 0;
  for (Candidate& candidate : candidates) {
    ConstraintInstance instance;
    instance.id = source_name + "_" + tmpl.id() + "_" + std::to_string(counter++);
    instance.structure = tmpl.id();
    instance.source = source_name;
    instance.spec = instantiate(tmpl, candidate.targets);
    instance.targets = std::move(candidate.targets);
    instance.example = std::move(candidate.example);
    instance.prompt = render_instruction(instance.spec);
    instances.push_back(std::move(instance));
  }
  return instances;
}

std::vector<Chunk> capped_chunks(const Document& document, Level level,
                                 const SourceConfig& config, const Caps& caps,
                                 std::uint64_t seed) {
  std::vector<Chunk> chunks = chunk_document(document, level, config);
  if (chunks.size() <= caps.chunks_per_doc) return chunks;
  DeterministicRng rng(mix_seed(mix_seed(seed, document.id), "chunk_cap"));
  auto picks = rng.sample_indices(chunks.size(), caps.chunks_per_doc);
  std::sort(picks.begin(), picks.end());
  std::vector<Chunk> kept;
  kept.reserve(picks.size());
  for (std::size_t p : picks) kept.push_back(std::move(chunks[p]));
  return kept;
}

}  // namespace

Dataset assemble_dataset(const std::vector<SourceSpec>& sources,
                         const StructureRegistry& registry,
                         const std::vector<std::string>& structure_ids, const Caps& caps,
                         std::uint64_t seed, const ExtractOptions& options) {
  std::vector<const StructureTemplate*> templates;
  for (const std::string& id : structure_ids) {
    const StructureTemplate* tmpl = registry.find(id);
    if (tmpl == nullptr) throw ExtractError("unknown structure id \"" + id + "\"");
    templates.push_back(tmpl);
  }

  Dataset dataset;
  dataset.meta.seed = seed;
  dataset.meta.caps = caps;
  dataset.meta.tool_version = std::string(kToolVersion);

  for (const SourceSpec& source : sources) {
    const std::string& name = source.config.name;
    std::uint64_t source_seed = mix_seed(seed, name);

    if (source.word_list) {
      std::vector<std::string> words = load_word_list(source.path);
      std::vector<Chunk> chunks;
      chunks.reserve(words.size());
      std::int64_t position = 0;
      for (std::string& word : words)
        chunks.push_back(Chunk{"words", Level::Word, std::move(word), name, position++});
      for (const StructureTemplate* tmpl : templates) {
        if (tmpl->gen_level() != Level::Word) continue;
        auto instances =
            extract_for_structure(*tmpl, chunks, name, caps, source_seed, options);
        dataset.instances.insert(dataset.instances.end(),
                                 std::make_move_iterator(instances.begin()),
                                 std::make_move_iterator(instances.end()));
      }
      continue;
    }

    std::vector<Document> documents =
        load_documents(source.path, caps.docs_per_source, source_seed);
    for (Level level : {Level::Sentence, Level::Paragraph, Level::Passage}) {
      bool needed = std::any_of(templates.begin(), templates.end(),
                                [&](const auto* t) { return t->gen_level() == level; });
      if (!needed) continue;
      std::vector<Chunk> chunks;
      for (const Document& document : documents) {
        auto doc_chunks = capped_chunks(document, level, source.config, caps, source_seed);
        chunks.insert(chunks.end(), std::make_move_iterator(doc_chunks.begin()),
                      std::make_move_iterator(doc_chunks.end()));
      }
      for (const StructureTemplate* tmpl : templates) {
        if (tmpl->gen_level() != level) continue;
        auto instances =
            extract_for_structure(*tmpl, chunks, name, caps, source_seed, options);
        dataset.instances.insert(dataset.instances.end(),
                                 std::make_move_iterator(instances.begin()),
                                 std::make_move_iterator(instances.end()));
      }
    }
  }
  return dataset;
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  json caps;
  caps["docsPerSource"] = dataset.meta.caps.docs_per_source;
  caps["chunksPerDoc"] = dataset.meta.caps.chunks_per_doc;
  caps["targetsPerStructurePerSource"] = dataset.meta.caps.targets_per_structure_per_source;
  json meta;
  meta["seed"] = dataset.meta.seed;
  meta["caps"] = std::move(caps);
  meta["tool_version"] = dataset.meta.tool_version;
  if (!dataset.meta.input_digests.empty()) {
    json digests = json::object();
    for (const auto& [name, digest] : dataset.meta.input_digests) digests[name] = digest;
    meta["inputs"] = std::move(digests);
  }
  json header;
  header["meta"] = std::move(meta);
  out << header.dump() << "\n";

  for (const ConstraintInstance& instance : dataset.instances) {
    json line;
    line["id"] = instance.id;
    line["structure"] = instance.structure;
    line["source"] = instance.source;
    line["spec"] = spec_to_json(instance.spec);
    line["targets"] = instance.targets;
    line["example"] = instance.example;
    line["prompt"] = instance.prompt;
    out << line.dump() << "\n";
  }
}

void write_dataset_file(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExtractError("cannot write dataset file: " + path.string());
  write_dataset(dataset, out);
}

Dataset read_dataset(std::istream& in) {
  Dataset dataset;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json record = json::parse(line);
    if (!have_header) {
      if (!record.contains("meta"))
        throw ExtractError("dataset file is missing its meta header line");
      const json& meta = record.at("meta");
      dataset.meta.seed = meta.value("seed", 0ULL);
      dataset.meta.tool_version = meta.value("tool_version", std::string());
      if (auto it = meta.find("caps"); it != meta.end()) {
        dataset.meta.caps.docs_per_source = it->value("docsPerSource", std::size_t{300});
        dataset.meta.caps.chunks_per_doc = it->value("chunksPerDoc", std::size_t{100});
        dataset.meta.caps.targets_per_structure_per_source =
            it->value("targetsPerStructurePerSource", std::size_t{100});
      }
      if (auto it = meta.find("inputs"); it != meta.end()) {
        for (const auto& [name, digest] : it->items())
          dataset.meta.input_digests.emplace_back(name, digest.get<std::string>());
      }
      have_header = true;
      continue;
    }
    ConstraintInstance instance;
    instance.id = record.at("id").get<std::string>();
    instance.structure = record.at("structure").get<std::string>();
    instance.source = record.at("source").get<std::string>();
    instance.spec = spec_from_json(record.at("spec"));
    instance.targets = record.value("targets", json::object());
    instance.example = record.value("example", std::string());
    instance.prompt = record.at("prompt").get<std::string>();
    dataset.instances.push_back(std::move(instance));
  }
  return dataset;
}

Dataset read_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ExtractError("cannot read dataset file: " + path.string());
  return read_dataset(in);
}

}  // namespace collie
