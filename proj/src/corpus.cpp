#include "collie/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "collie/rng.hpp"

namespace collie {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Unicode scalars in the raw prefix, whitespace included.
std::int64_t scalars_in(std::string_view text) {
  std::int64_t count = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
  }
  return count;
}

}  // namespace

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::Url: return "url";
    case FilterKind::AllCaps: return "all_caps";
    case FilterKind::NoSentences: return "no_sentences";
    case FilterKind::Copyright: return "copyright";
    case FilterKind::Caption: return "caption";
  }
  return "?";
}

std::string_view to_string(ProcessorKind kind) {
  switch (kind) {
    case ProcessorKind::MarkdownRemoval: return "markdown_removal";
    case ProcessorKind::BracketRemoval: return "bracket_removal";
    case ProcessorKind::SingleNewlineToSpace: return "single_newline_to_space";
    case ProcessorKind::ConsecutiveWhitespace: return "consecutive_whitespace";
  }
  return "?";
}

std::optional<FilterKind> filter_kind_from_string(std::string_view token) {
  for (FilterKind kind : {FilterKind::Url, FilterKind::AllCaps, FilterKind::NoSentences,
                          FilterKind::Copyright, FilterKind::Caption}) {
    if (to_string(kind) == token) return kind;
  }
  return std::nullopt;
}

std::optional<ProcessorKind> processor_kind_from_string(std::string_view token) {
  for (ProcessorKind kind :
       {ProcessorKind::MarkdownRemoval, ProcessorKind::BracketRemoval,
        ProcessorKind::SingleNewlineToSpace, ProcessorKind::ConsecutiveWhitespace}) {
    if (to_string(kind) == token) return kind;
  }
  return std::nullopt;
}

bool filter_keeps(FilterKind kind, std::string_view text) {
  switch (kind) {
    case FilterKind::Url: {
      static const std::regex url_pattern(
          R"((http(s)?://)?(www\.)?[a-zA-Z0-9\-]+\.[a-zA-Z]{2,6}(\.[a-zA-Z]{2,6})?(/[a-zA-Z0-9\-]*)*(\?[a-zA-Z0-9\-=&]*)?)");
      return !std::regex_search(text.begin(), text.end(), url_pattern);
    }
    case FilterKind::AllCaps: {
      bool has_letter = false;
      for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u < 0x80 && std::isalpha(u) != 0) {
          if (std::islower(u) != 0) return true;
          has_letter = true;
        }
      }
      return !has_letter;
    }
    case FilterKind::NoSentences: {
      for (std::string_view sentence : segment_units(text, Level::Sentence)) {
        if (sentence.find('.') != std::string_view::npos && count_chars(sentence) > 2)
          return true;
      }
      return false;
    }
    case FilterKind::Copyright: {
      if (text.find("\xC2\xA9") != std::string_view::npos) return false;
      auto words = split_words(text);
      if (words.empty()) return true;
      std::string first(words.front());
      std::transform(first.begin(), first.end(), first.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
      });
      return first != "copyright";
    }
    case FilterKind::Caption: {
      std::size_t colon = text.find(':');
      if (colon == std::string_view::npos) return true;
      return scalars_in(text.substr(0, colon)) >= 6;
    }
  }
  return true;
}

std::optional<FilterKind> first_rejection(std::span<const FilterKind> filters,
                                          std::string_view text) {
  for (FilterKind kind : filters) {
    if (!filter_keeps(kind, text)) return kind;
  }
  return std::nullopt;
}

std::string post_process(ProcessorKind kind, std::string_view text) {
  switch (kind) {
    case ProcessorKind::MarkdownRemoval: {
      static const std::regex pattern(R"((\*\*|__|\*|_|~~)(.*?)\1)");
      std::string current(text);
      for (;;) {
        std::string next = std::regex_replace(current, pattern, "$2");
        if (next == current) return current;
        current = std::move(next);
      }
    }
    case ProcessorKind::BracketRemoval: {
      static const std::regex pattern(R"(\[[^\]]*\])");
      return std::regex_replace(std::string(text), pattern, "");
    }
    case ProcessorKind::SingleNewlineToSpace: {
      // (?<!\n)\n(?!\n) without lookbehind support: replace a newline only
      // when neither neighbour is one.
      std::string out;
      out.reserve(text.size());
      for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n' && (i == 0 || text[i - 1] != '\n') &&
            (i + 1 == text.size() || text[i + 1] != '\n')) {
          out += ' ';
        } else {
          out += text[i];
        }
      }
      return out;
    }
    case ProcessorKind::ConsecutiveWhitespace: {
      static const std::regex pattern(R"(\s{2,})");
      return std::regex_replace(std::string(text), pattern, " ");
    }
  }
  return std::string(text);
}

std::string post_process(std::span<const ProcessorKind> processors, std::string_view text) {
  std::string out(text);
  for (ProcessorKind kind : processors) out = post_process(kind, out);
  return out;
}

SourceConfig SourceConfig::wiki() {
  SourceConfig config;
  config.name = "wiki";
  config.delimiter = ParagraphDelimiter::BlankLine;
  config.filters = {FilterKind::Url, FilterKind::Caption, FilterKind::NoSentences};
  config.strip_heading_line = true;
  config.reject_vertical_bar_in_passages = true;
  return config;
}

SourceConfig SourceConfig::ccnews() {
  SourceConfig config;
  config.name = "ccnews";
  config.delimiter = ParagraphDelimiter::SingleNewline;
  config.filters = {FilterKind::Copyright, FilterKind::Url, FilterKind::Caption,
                    FilterKind::NoSentences};
  return config;
}

SourceConfig SourceConfig::guten() {
  SourceConfig config;
  config.name = "guten";
  config.delimiter = ParagraphDelimiter::BlankLine;
  config.filters = {FilterKind::AllCaps, FilterKind::NoSentences};
  config.processors = {ProcessorKind::MarkdownRemoval, ProcessorKind::BracketRemoval,
                       ProcessorKind::SingleNewlineToSpace,
                       ProcessorKind::ConsecutiveWhitespace};
  return config;
}

std::optional<SourceConfig> SourceConfig::builtin(std::string_view name) {
  if (name == "wiki") return wiki();
  if (name == "ccnews") return ccnews();
  if (name == "guten") return guten();
  return std::nullopt;
}

SourceConfig SourceConfig::from_json(const json& value) {
  if (!value.is_object()) throw std::runtime_error("source config must be an object");
  SourceConfig config;
  config.name = value.value("name", std::string("custom"));
  std::string delim = value.value("paragraphDelimiter", std::string("blank-line-run"));
  if (delim == "blank-line-run") {
    config.delimiter = ParagraphDelimiter::BlankLine;
  } else if (delim == "single-newline") {
    config.delimiter = ParagraphDelimiter::SingleNewline;
  } else {
    throw std::runtime_error("unknown paragraphDelimiter \"" + delim + "\"");
  }
  if (auto it = value.find("filters"); it != value.end()) {
    for (const auto& token : *it) {
      auto kind = filter_kind_from_string(token.get<std::string>());
      if (!kind)
        throw std::runtime_error("unknown filter \"" + token.get<std::string>() + "\"");
      config.filters.push_back(*kind);
    }
  }
  if (auto it = value.find("postProcessors"); it != value.end()) {
    for (const auto& token : *it) {
      auto kind = processor_kind_from_string(token.get<std::string>());
      if (!kind)
        throw std::runtime_error("unknown post-processor \"" + token.get<std::string>() +
                                 "\"");
      config.processors.push_back(*kind);
    }
  }
  config.strip_heading_line = value.value("stripHeadingLine", false);
  config.reject_vertical_bar_in_passages = value.value("rejectVerticalBarInPassages", false);
  return config;
}

json SourceConfig::to_json() const {
  json out;
  out["name"] = name;
  out["paragraphDelimiter"] =
      delimiter == ParagraphDelimiter::BlankLine ? "blank-line-run" : "single-newline";
  json filter_tokens = json::array();
  for (FilterKind kind : filters) filter_tokens.push_back(std::string(to_string(kind)));
  out["filters"] = std::move(filter_tokens);
  json processor_tokens = json::array();
  for (ProcessorKind kind : processors)
    processor_tokens.push_back(std::string(to_string(kind)));
  out["postProcessors"] = std::move(processor_tokens);
  out["stripHeadingLine"] = strip_heading_line;
  out["rejectVerticalBarInPassages"] = reject_vertical_bar_in_passages;
  return out;
}

std::vector<Document> load_documents(const std::filesystem::path& path, std::size_t limit,
                                     std::uint64_t seed, LoadStats* stats) {
  LoadStats local;
  std::vector<Document> documents;

  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt")
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    local.available = files.size();

    DeterministicRng rng(mix_seed(seed, "load_documents"));
    rng.shuffle(files);
    if (files.size() > limit) files.resize(limit);
    documents.reserve(files.size());
    for (const auto& file : files)
      documents.push_back(Document{file.stem().string(), read_file(file)});
  } else if (std::filesystem::is_regular_file(path)) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read corpus file: " + path.string());
    std::string line;
    std::vector<Document> all;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      ++local.available;
      try {
        json record = json::parse(line);
        all.push_back(
            Document{record.at("id").get<std::string>(), record.at("text").get<std::string>()});
      } catch (const std::exception&) {
        ++local.skipped;
      }
    }
    DeterministicRng rng(mix_seed(seed, "load_documents"));
    rng.shuffle(all);
    if (all.size() > limit) all.resize(limit);
    documents = std::move(all);
  } else {
    throw std::runtime_error("corpus path is neither a directory nor a file: " +
                             path.string());
  }

  if (stats != nullptr) *stats = local;
  return documents;
}

namespace {

std::string strip_heading(std::string_view paragraph) {
  std::size_t nl = paragraph.find('\n');
  if (nl == std::string_view::npos) return std::string(paragraph);
  return std::string(trim(paragraph.substr(nl + 1)));
}

}  // namespace

std::vector<Chunk> chunk_document(const Document& document, Level level,
                                  const SourceConfig& config) {
  std::vector<Chunk> chunks;
  std::int64_t position = 0;
  auto emit = [&](std::string text) {
    chunks.push_back(Chunk{document.id, level, std::move(text), config.name, position++});
  };

  std::vector<std::string> paragraphs;
  for (std::string_view raw : split_paragraphs(document.text, config.delimiter)) {
    std::string para =
        config.strip_heading_line ? strip_heading(raw) : std::string(raw);
    if (!trim(para).empty()) paragraphs.push_back(std::move(para));
  }

  switch (level) {
    case Level::Sentence: {
      for (const std::string& para : paragraphs) {
        for (std::string_view sentence : split_sentences(para)) {
          if (first_rejection(config.filters, sentence)) continue;
          std::string text = post_process(config.processors, sentence);
          if (!trim(text).empty()) emit(std::string(trim(text)));
        }
      }
      break;
    }
    case Level::Paragraph: {
      for (const std::string& para : paragraphs) {
        if (first_rejection(config.filters, para)) continue;
        std::string text = post_process(config.processors, para);
        if (!trim(text).empty()) emit(std::string(trim(text)));
      }
      break;
    }
    case Level::Passage: {
      std::vector<std::string> run;
      auto flush_run = [&] {
        if (run.size() >= 2) {
          std::string joined;
          for (std::size_t i = 0; i < run.size(); ++i) {
            if (i > 0) joined += "\n\n";
            joined += run[i];
          }
          emit(std::move(joined));
        }
        run.clear();
      };
      for (const std::string& para : paragraphs) {
        bool keep = !first_rejection(config.filters, para).has_value();
        if (keep && config.reject_vertical_bar_in_passages &&
            para.find('|') != std::string::npos) {
          keep = false;
        }
        std::string text;
        if (keep) {
          text = std::string(trim(post_process(config.processors, para)));
          keep = !text.empty();
        }
        if (keep) {
          run.push_back(std::move(text));
        } else {
          flush_run();
        }
      }
      flush_run();
      break;
    }
    default:
      // Word-level targets come from a word list, not from documents.
      break;
  }
  return chunks;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read word list: " + path.string());
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view word = trim(line);
    if (word.empty()) continue;
    std::string owned(word);
    if (seen.insert(owned).second) words.push_back(std::move(owned));
  }
  return words;
}

}  // namespace collie
