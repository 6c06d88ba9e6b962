#include "collie/segment.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "collie/resources.hpp"

namespace collie {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii(char c) { return static_cast<unsigned char>(c) < 0x80; }

bool is_alnum(char c) {
  return is_ascii(c) && std::isalnum(static_cast<unsigned char>(c)) != 0;
}

char fold(char c) {
  return is_ascii(c) ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : c;
}

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

// Quote/bracket characters that may trail a sentence terminator. Returns the
// byte length of the closing mark at `pos`, or 0.
std::size_t closing_mark_len(std::string_view s, std::size_t pos) {
  char c = s[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
  // U+201D, U+2019 and U+00BB in UTF-8
  if (s.substr(pos).starts_with("\xE2\x80\x9D")) return 3;
  if (s.substr(pos).starts_with("\xE2\x80\x99")) return 3;
  if (s.substr(pos).starts_with("\xC2\xBB")) return 2;
  return 0;
}

bool is_opening_mark(std::string_view s, std::size_t pos) {
  char c = s[pos];
  if (c == '"' || c == '\'' || c == '(' || c == '[' || c == '{') return true;
  return s.substr(pos).starts_with("\xE2\x80\x9C") ||  // U+201C
         s.substr(pos).starts_with("\xE2\x80\x98") ||  // U+2018
         s.substr(pos).starts_with("\xC2\xAB");        // U+00AB
}

bool is_continuation_byte(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

// Token containing the period at `dot`, lowercased, leading quote/bracket
// marks stripped. Used for abbreviation lookups.
std::string token_ending_at(std::string_view s, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !is_space(s[begin - 1])) --begin;
  while (begin < dot && is_opening_mark(s, begin)) {
    std::size_t skip = 1;
    if (!is_ascii(s[begin])) {
      skip = 1;
      while (begin + skip < dot && is_continuation_byte(s[begin + skip])) ++skip;
    }
    begin += skip;
  }
  std::string token(s.substr(begin, dot - begin + 1));
  std::transform(token.begin(), token.end(), token.begin(), fold);
  return token;
}

// A lone capital followed by a period reads as an initial ("J. K. Rowling").
bool looks_like_initial(std::string_view token) {
  return token.size() == 2 && token[1] == '.' &&
         std::isalpha(static_cast<unsigned char>(token[0])) != 0;
}

}  // namespace

std::string_view trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return text.substr(b, e - b);
}

AbbreviationSet::AbbreviationSet(std::vector<std::string> entries) {
  for (auto& entry : entries) {
    std::transform(entry.begin(), entry.end(), entry.begin(), fold);
    entries_.insert(std::move(entry));
  }
}

AbbreviationSet AbbreviationSet::parse(std::string_view one_per_line) {
  std::vector<std::string> entries;
  std::size_t pos = 0;
  while (pos <= one_per_line.size()) {
    std::size_t nl = one_per_line.find('\n', pos);
    std::string_view line = one_per_line.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    line = trim(line);
    if (!line.empty()) entries.emplace_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return AbbreviationSet(std::move(entries));
}

AbbreviationSet AbbreviationSet::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read abbreviation list: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

namespace {
AbbreviationSet& default_abbreviations() {
  static AbbreviationSet set = AbbreviationSet::parse(resources::abbreviations_txt);
  return set;
}
}  // namespace

const AbbreviationSet& AbbreviationSet::default_set() { return default_abbreviations(); }

void AbbreviationSet::set_default(AbbreviationSet set) {
  default_abbreviations() = std::move(set);
}

bool AbbreviationSet::contains(std::string_view lowercased_token) const {
  return entries_.count(std::string(lowercased_token)) > 0;
}

std::vector<std::string_view> split_paragraphs(std::string_view passage,
                                               ParagraphDelimiter delim) {
  std::vector<std::string_view> out;
  if (delim == ParagraphDelimiter::SingleNewline) {
    std::size_t pos = 0;
    while (pos <= passage.size()) {
      std::size_t nl = passage.find('\n', pos);
      std::string_view part = passage.substr(
          pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      part = trim(part);
      if (!part.empty()) out.push_back(part);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    return out;
  }

  // Blank-line mode: a paragraph is a maximal run of lines where no line is
  // empty or whitespace-only.
  std::size_t line_start = 0;
  std::size_t para_begin = std::string_view::npos;
  std::size_t para_end = 0;
  auto flush = [&] {
    if (para_begin == std::string_view::npos) return;
    std::string_view para = trim(passage.substr(para_begin, para_end - para_begin));
    if (!para.empty()) out.push_back(para);
    para_begin = std::string_view::npos;
  };
  while (line_start <= passage.size()) {
    std::size_t nl = passage.find('\n', line_start);
    std::size_t line_end = nl == std::string_view::npos ? passage.size() : nl;
    std::string_view line = passage.substr(line_start, line_end - line_start);
    if (trim(line).empty()) {
      flush();
    } else {
      if (para_begin == std::string_view::npos) para_begin = line_start;
      para_end = line_end;
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  flush();
  return out;
}

std::vector<std::string_view> split_sentences(std::string_view paragraph) {
  return split_sentences(paragraph, AbbreviationSet::default_set());
}

std::vector<std::string_view> split_sentences(std::string_view paragraph,
                                              const AbbreviationSet& abbreviations) {
  std::vector<std::string_view> out;
  std::string_view text = trim(paragraph);
  if (text.empty()) return out;

  std::size_t start = 0;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto emit = [&](std::size_t end_exclusive) {
    std::string_view sentence = trim(text.substr(start, end_exclusive - start));
    if (!sentence.empty()) out.push_back(sentence);
  };

  while (i < n) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t run_begin = i;
    std::size_t run_end = i;
    while (run_end + 1 < n && is_terminator(text[run_end + 1])) ++run_end;
    std::size_t end = run_end + 1;
    while (end < n) {
      std::size_t len = closing_mark_len(text, end);
      if (len == 0) break;
      end += len;
    }

    if (end >= n) {
      emit(n);
      start = n;
      break;
    }
    if (!is_space(text[end])) {
      i = end;
      continue;
    }
    std::size_t next = end;
    while (next < n && is_space(text[next])) ++next;
    if (next >= n) {
      emit(end);
      start = n;
      break;
    }

    char c = text[next];
    bool starts_sentence = (std::isupper(static_cast<unsigned char>(c)) != 0) ||
                           (std::isdigit(static_cast<unsigned char>(c)) != 0) ||
                           is_opening_mark(text, next);
    bool suppressed = false;
    if (starts_sentence && run_begin == run_end && text[run_begin] == '.') {
      std::string token = token_ending_at(text, run_begin);
      suppressed = abbreviations.contains(token) || looks_like_initial(token);
    }
    if (starts_sentence && !suppressed) {
      emit(end);
      start = next;
      i = next;
    } else {
      i = end;
    }
  }
  if (start < n) emit(n);
  return out;
}

std::vector<std::string_view> split_words(std::string_view sentence) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n) {
    while (i < n && is_space(sentence[i])) ++i;
    std::size_t begin = i;
    while (i < n && !is_space(sentence[i])) ++i;
    if (i > begin) out.push_back(sentence.substr(begin, i - begin));
  }
  return out;
}

std::int64_t count_chars(std::string_view unit) {
  std::string_view t = trim(unit);
  std::int64_t count = 0;
  for (char c : t) {
    if (!is_continuation_byte(c)) ++count;
  }
  return count;
}

std::string normalize_word(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && is_ascii(token[b]) && !is_alnum(token[b])) ++b;
  while (e > b && is_ascii(token[e - 1]) && !is_alnum(token[e - 1])) --e;
  std::string out(token.substr(b, e - b));
  std::transform(out.begin(), out.end(), out.begin(), fold);
  return out;
}

std::string normalize_unit(Level level, std::string_view unit) {
  if (level == Level::Word) return normalize_word(unit);
  std::string out(trim(unit));
  std::transform(out.begin(), out.end(), out.begin(), fold);
  return out;
}

std::vector<std::string_view> segment_units(std::string_view text, Level unit_level) {
  return segment_units(text, unit_level, AbbreviationSet::default_set());
}

std::vector<std::string_view> segment_units(std::string_view text, Level unit_level,
                                            const AbbreviationSet& abbreviations) {
  std::string_view t = trim(text);
  std::vector<std::string_view> out;
  if (t.empty()) return out;
  switch (unit_level) {
    case Level::Passage:
      out.push_back(t);
      break;
    case Level::Paragraph:
      out = split_paragraphs(t);
      break;
    case Level::Sentence:
      for (std::string_view para : split_paragraphs(t)) {
        auto sentences = split_sentences(para, abbreviations);
        out.insert(out.end(), sentences.begin(), sentences.end());
      }
      break;
    case Level::Word:
      out = split_words(t);
      break;
    case Level::Char: {
      std::size_t i = 0;
      while (i < t.size()) {
        std::size_t len = 1;
        while (i + len < t.size() && is_continuation_byte(t[i + len])) ++len;
        out.push_back(t.substr(i, len));
        i += len;
      }
      break;
    }
  }
  return out;
}

std::int64_t unit_count(std::string_view text, Level unit_level) {
  if (unit_level == Level::Char) return count_chars(text);
  return static_cast<std::int64_t>(segment_units(text, unit_level).size());
}

SegmentedText::SegmentedText(std::string raw, Level level)
    : raw_(std::move(raw)), level_(level) {}

const std::vector<std::string_view>& SegmentedText::units(Level unit_level) const {
  auto& slot = cache_[static_cast<std::size_t>(unit_level)];
  if (!slot) slot = segment_units(raw_, unit_level);
  return *slot;
}

std::int64_t SegmentedText::unit_count(Level unit_level) const {
  if (unit_level == Level::Char) return count_chars(raw_);
  return static_cast<std::int64_t>(units(unit_level).size());
}

}  // namespace collie
