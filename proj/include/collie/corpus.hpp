#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collie/json.hpp"
#include "collie/levels.hpp"
#include "collie/segment.hpp"

namespace collie {

enum class FilterKind : std::uint8_t { Url, AllCaps, NoSentences, Copyright, Caption };

enum class ProcessorKind : std::uint8_t {
  MarkdownRemoval,
  BracketRemoval,
  SingleNewlineToSpace,
  ConsecutiveWhitespace,
};

std::string_view to_string(FilterKind kind);
std::string_view to_string(ProcessorKind kind);
std::optional<FilterKind> filter_kind_from_string(std::string_view token);
std::optional<ProcessorKind> processor_kind_from_string(std::string_view token);

/// True when the string survives the filter.
bool filter_keeps(FilterKind kind, std::string_view text);

/// First filter in order that rejects the string, if any.
std::optional<FilterKind> first_rejection(std::span<const FilterKind> filters,
                                          std::string_view text);

std::string post_process(ProcessorKind kind, std::string_view text);
std::string post_process(std::span<const ProcessorKind> processors, std::string_view text);

/// Per-source chunking and cleaning rules.
struct SourceConfig {
  std::string name;
  ParagraphDelimiter delimiter = ParagraphDelimiter::BlankLine;
  std::vector<FilterKind> filters;
  std::vector<ProcessorKind> processors;
  /// Drop everything before the first newline of a multi-line paragraph
  /// (section headings sit on their own leading line).
  bool strip_heading_line = false;
  /// When assembling passages, treat paragraphs containing '|' as filtered
  /// out (they are usually tables).
  bool reject_vertical_bar_in_passages = false;

  static SourceConfig wiki();
  static SourceConfig ccnews();
  static SourceConfig guten();
  static std::optional<SourceConfig> builtin(std::string_view name);

  static SourceConfig from_json(const json& value);
  json to_json() const;
};

struct Document {
  std::string id;
  std::string text;
};

struct Chunk {
  std::string doc_id;
  Level level = Level::Paragraph;
  std::string text;
  std::string source;
  std::int64_t position = 0;  // emit order within the document
};

struct LoadStats {
  std::size_t available = 0;  // records seen before sampling
  std::size_t skipped = 0;    // malformed records dropped with a warning
};

/// Loads documents from a directory of .txt files (one document each) or a
/// .jsonl file of {"id", "text"} records, then samples up to `limit` of
/// them with the seeded generator. Same seed, same sequence.
std::vector<Document> load_documents(const std::filesystem::path& path, std::size_t limit,
                                     std::uint64_t seed, LoadStats* stats = nullptr);

/// Splits a document into chunks of the requested level: paragraphs via the
/// source delimiter, sentences via the segmenter, passages by joining
/// maximal runs of consecutive surviving paragraphs (at least two). Filters
/// run before post-processors, per unit.
std::vector<Chunk> chunk_document(const Document& document, Level level,
                                  const SourceConfig& config);

/// Ordered unique words from a newline-separated file, kept verbatim.
std::vector<std::string> load_word_list(const std::filesystem::path& path);

}  // namespace collie
