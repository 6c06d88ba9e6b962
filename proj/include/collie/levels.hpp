#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace collie {

/// Text granularity, totally ordered from smallest to largest.
enum class Level : std::uint8_t { Char = 0, Word, Sentence, Paragraph, Passage };

inline constexpr std::array<Level, 5> kAllLevels = {
    Level::Char, Level::Word, Level::Sentence, Level::Paragraph, Level::Passage};

constexpr bool operator<(Level a, Level b) {
  return static_cast<std::uint8_t>(a) < static_cast<std::uint8_t>(b);
}
constexpr bool operator<=(Level a, Level b) {
  return static_cast<std::uint8_t>(a) <= static_cast<std::uint8_t>(b);
}
constexpr bool operator>(Level a, Level b) { return b < a; }
constexpr bool operator>=(Level a, Level b) { return b <= a; }

constexpr std::string_view to_string(Level level) {
  switch (level) {
    case Level::Char: return "char";
    case Level::Word: return "word";
    case Level::Sentence: return "sentence";
    case Level::Paragraph: return "paragraph";
    case Level::Passage: return "passage";
  }
  return "?";
}

std::optional<Level> level_from_string(std::string_view token);

/// Relation between two strings.
enum class StringRelation : std::uint8_t { Eq, Neq };

/// Relation between two integers.
enum class NumberRelation : std::uint8_t { Eq, Neq, Gt, Lt, Le, Ge };

constexpr std::string_view to_string(StringRelation rel) {
  return rel == StringRelation::Eq ? "eq" : "neq";
}

constexpr std::string_view to_string(NumberRelation rel) {
  switch (rel) {
    case NumberRelation::Eq: return "eq";
    case NumberRelation::Neq: return "neq";
    case NumberRelation::Gt: return "gt";
    case NumberRelation::Lt: return "lt";
    case NumberRelation::Le: return "le";
    case NumberRelation::Ge: return "ge";
  }
  return "?";
}

std::optional<StringRelation> string_relation_from_string(std::string_view token);
std::optional<NumberRelation> number_relation_from_string(std::string_view token);

constexpr bool holds(NumberRelation rel, std::int64_t actual, std::int64_t bound) {
  switch (rel) {
    case NumberRelation::Eq: return actual == bound;
    case NumberRelation::Neq: return actual != bound;
    case NumberRelation::Gt: return actual > bound;
    case NumberRelation::Lt: return actual < bound;
    case NumberRelation::Le: return actual <= bound;
    case NumberRelation::Ge: return actual >= bound;
  }
  return false;
}

constexpr bool holds(StringRelation rel, bool equal) {
  return rel == StringRelation::Eq ? equal : !equal;
}

}  // namespace collie
