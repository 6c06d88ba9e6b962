#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "collie/levels.hpp"

namespace collie {

/// How paragraph boundaries are recognized inside a document.
enum class ParagraphDelimiter : std::uint8_t {
  BlankLine,      // runs of one or more blank lines
  SingleNewline,  // every newline starts a new paragraph
};

std::string_view trim(std::string_view text);

/// Words whose trailing period does not end a sentence ("dr.", "e.g.", ...).
/// Entries are stored lowercase with the trailing period.
class AbbreviationSet {
 public:
  AbbreviationSet() = default;
  explicit AbbreviationSet(std::vector<std::string> entries);

  static const AbbreviationSet& default_set();
  static AbbreviationSet load_file(const std::filesystem::path& path);
  static AbbreviationSet parse(std::string_view one_per_line);

  /// Replaces the process-wide default list. Call once at startup, before
  /// any concurrent segmentation.
  static void set_default(AbbreviationSet set);

  bool contains(std::string_view lowercased_token) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_set<std::string> entries_;
};

std::vector<std::string_view> split_paragraphs(
    std::string_view passage, ParagraphDelimiter delim = ParagraphDelimiter::BlankLine);

std::vector<std::string_view> split_sentences(std::string_view paragraph);
std::vector<std::string_view> split_sentences(std::string_view paragraph,
                                              const AbbreviationSet& abbreviations);

/// Whitespace tokenization; tokens keep their punctuation.
std::vector<std::string_view> split_words(std::string_view sentence);

/// Number of Unicode scalar values after trimming surrounding whitespace;
/// internal whitespace is counted.
std::int64_t count_chars(std::string_view unit);

/// Comparison form of a word token: surrounding non-alphanumerics stripped,
/// ASCII case folded. Internal apostrophes and hyphens survive.
std::string normalize_word(std::string_view token);

/// Comparison form of a unit at the given level. Chars and full units fold
/// case; words additionally shed surrounding punctuation; sentence and
/// larger units are trimmed, case folded, and otherwise kept verbatim.
std::string normalize_unit(Level level, std::string_view unit);

/// Units of `text` at `unit_level`, where `text` itself sits at or above
/// that level. Asking for units at or above the text's own granularity
/// yields the trimmed text as the single unit. Char units are returned as
/// one string view per Unicode scalar of the trimmed text.
std::vector<std::string_view> segment_units(std::string_view text, Level unit_level);
std::vector<std::string_view> segment_units(std::string_view text, Level unit_level,
                                            const AbbreviationSet& abbreviations);

/// Number of units of `text` at `unit_level`; char units are counted with
/// count_chars (whitespace included).
std::int64_t unit_count(std::string_view text, Level unit_level);

/// A piece of text bound to a level, with unit boundaries computed lazily
/// and cached per sub-level. Immutable after construction.
class SegmentedText {
 public:
  SegmentedText(std::string raw, Level level);

  // Cached views point into raw_, so the value must stay put.
  SegmentedText(const SegmentedText&) = delete;
  SegmentedText& operator=(const SegmentedText&) = delete;

  const std::string& raw() const { return raw_; }
  Level level() const { return level_; }

  /// Cached views into raw() for the units at `unit_level`.
  const std::vector<std::string_view>& units(Level unit_level) const;
  std::int64_t unit_count(Level unit_level) const;

 private:
  std::string raw_;
  Level level_;
  mutable std::optional<std::vector<std::string_view>> cache_[5];
};

}  // namespace collie
