#include <doctest.h>

#include <fstream>
#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "collie/json.hpp"
#include "collie/rng.hpp"
#include "collie/segment.hpp"

using namespace collie;

namespace {

std::vector<std::string> owned(const std::vector<std::string_view>& views) {
  return {views.begin(), views.end()};
}

}  // namespace

TEST_CASE("split_paragraphs on blank-line runs") {
  CHECK(owned(split_paragraphs("A.\n\nB.")) == std::vector<std::string>{"A.", "B."});
  CHECK(owned(split_paragraphs("A.\n\n\n\nB.")) == std::vector<std::string>{"A.", "B."});
  CHECK(split_paragraphs("").empty());
  CHECK(owned(split_paragraphs("A.\n   \nB.")) == std::vector<std::string>{"A.", "B."});
  CHECK(owned(split_paragraphs("line one\nline two\n\nnext")) ==
        std::vector<std::string>{"line one\nline two", "next"});
}

TEST_CASE("split_paragraphs with the single-newline delimiter") {
  CHECK(owned(split_paragraphs("A.\nB.", ParagraphDelimiter::SingleNewline)) ==
        std::vector<std::string>{"A.", "B."});
  CHECK(owned(split_paragraphs("A.\n\nB.", ParagraphDelimiter::SingleNewline)) ==
        std::vector<std::string>{"A.", "B."});
}

TEST_CASE("split_sentences handles plain terminated clauses") {
  CHECK(owned(split_sentences("I ran. He walked!")) ==
        std::vector<std::string>{"I ran.", "He walked!"});
  CHECK(owned(split_sentences("End")) == std::vector<std::string>{"End"});
  CHECK(split_sentences("").empty());
}

TEST_CASE("split_sentences suppresses abbreviation periods") {
  CHECK(owned(split_sentences("Dr. Smith left.")) ==
        std::vector<std::string>{"Dr. Smith left."});
  CHECK(owned(split_sentences("He met Mrs. Jones. She waved.")) ==
        std::vector<std::string>{"He met Mrs. Jones.", "She waved."});
  CHECK(owned(split_sentences("This works, e.g. Baseline runs.")) ==
        std::vector<std::string>{"This works, e.g. Baseline runs."});
}

TEST_CASE("split_sentences keeps initials together") {
  CHECK(owned(split_sentences("J. K. Rowling wrote it. I read it.")) ==
        std::vector<std::string>{"J. K. Rowling wrote it.", "I read it."});
}

TEST_CASE("split_sentences carries closing quotes with the sentence") {
  CHECK(owned(split_sentences("He said \"Stop.\" Then he left.")) ==
        std::vector<std::string>{"He said \"Stop.\"", "Then he left."});
  CHECK(owned(split_sentences("Really?! Yes.")) ==
        std::vector<std::string>{"Really?!", "Yes."});
}

TEST_CASE("split_sentences does not break on decimals") {
  CHECK(owned(split_sentences("It weighs 3.5 kilograms. Heavy.")) ==
        std::vector<std::string>{"It weighs 3.5 kilograms.", "Heavy."});
}

TEST_CASE("split_words keeps punctuation attached") {
  CHECK(owned(split_words("soft, warm beach.")) ==
        std::vector<std::string>{"soft,", "warm", "beach."});
  CHECK(split_words("state-of-the-art").size() == 1);
  CHECK(owned(split_words("  a  b ")) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("count_chars counts scalars after trimming the ends") {
  CHECK(count_chars("ab cd") == 5);
  CHECK(count_chars(" ab ") == 2);
  CHECK(count_chars("") == 0);
  CHECK(count_chars("na\xC3\xAFve") == 5);  // naïve
}

TEST_CASE("normalize_word strips edges and folds case") {
  CHECK(normalize_word("Beach,") == "beach");
  CHECK(normalize_word("'tis") == "tis");
  CHECK(normalize_word("state-of-the-art.") == "state-of-the-art");
  CHECK(normalize_word("(o'clock)") == "o'clock");
  CHECK(normalize_word("--") == "");
}

TEST_CASE("normalize_word is idempotent") {
  DeterministicRng rng(7);
  const std::string alphabet = "aAzZ09.,'-()! \"";
  for (int i = 0; i < 2000; ++i) {
    std::string token;
    std::size_t len = rng.below(12);
    for (std::size_t j = 0; j < len; ++j) token += alphabet[rng.below(alphabet.size())];
    std::string once = normalize_word(token);
    CHECK(normalize_word(once) == once);
  }
}

TEST_CASE("splitting a returned unit again yields the unit itself") {
  const std::string passage =
      "The sun rose over the hill. Birds sang in the cold air.\n\n"
      "Dr. Smith watched quietly. Nothing moved. The town slept on.";
  for (Level level : {Level::Paragraph, Level::Sentence, Level::Word}) {
    for (std::string_view unit : segment_units(passage, level)) {
      auto again = segment_units(unit, level);
      REQUIRE(again.size() == 1);
      CHECK(again[0] == trim(unit));
    }
  }
}

TEST_CASE("per-paragraph sentence counts sum to the passage sentence count") {
  const std::string passage =
      "One here. Two here! Three?\n\nA second block. With more. Sentences here.\n\n"
      "Final paragraph.";
  std::size_t total = 0;
  for (std::string_view para : split_paragraphs(passage))
    total += split_sentences(para).size();
  CHECK(total == segment_units(passage, Level::Sentence).size());
}

TEST_CASE("re-segmenting a unit matches slicing the parent's cache") {
  const std::string passage =
      "The sun rose over the hill. Birds sang in the cold air.\n\n"
      "Dr. Smith watched quietly. Nothing moved. The town slept on.";
  // Sentences of each paragraph, computed standalone, must concatenate to
  // the sentence list of the whole passage; same for words per sentence.
  std::vector<std::string> nested_sentences;
  for (std::string_view para : segment_units(passage, Level::Paragraph))
    for (std::string_view s : split_sentences(para)) nested_sentences.emplace_back(s);
  CHECK(nested_sentences == owned(segment_units(passage, Level::Sentence)));

  std::vector<std::string> nested_words;
  for (std::string_view s : segment_units(passage, Level::Sentence))
    for (std::string_view w : split_words(s)) nested_words.emplace_back(w);
  CHECK(nested_words == owned(segment_units(passage, Level::Word)));
}

TEST_CASE("appending a word token raises the word count by exactly one") {
  DeterministicRng rng(99);
  const std::vector<std::string> words = {"soft", "beach,", "math", "rock!",
                                          "state-of-the-art"};
  std::string sentence = "Start";
  for (int i = 0; i < 50; ++i) {
    std::size_t before = split_words(sentence).size();
    sentence += " " + words[rng.below(words.size())];
    CHECK(split_words(sentence).size() == before + 1);
  }
}

TEST_CASE("SegmentedText caches views into its own buffer") {
  SegmentedText text("One two three. Four five.", Level::Sentence);
  const auto& sentences = text.units(Level::Sentence);
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[0] == "One two three.");
  CHECK(text.unit_count(Level::Word) == 5);
  CHECK(text.unit_count(Level::Char) == 25);
  // Views must point into the owned buffer.
  const char* begin = text.raw().data();
  const char* end = begin + text.raw().size();
  for (std::string_view s : sentences) {
    CHECK(s.data() >= begin);
    CHECK(s.data() + s.size() <= end);
  }
}

TEST_CASE("sentence splits agree with the reference fixture at 98 percent") {
  std::ifstream in(std::string(COLLIE_FIXTURE_DIR) + "/sentence_parity.json");
  REQUIRE(in.good());
  json fixture;
  in >> fixture;
  REQUIRE(fixture.size() > 50);

  // Jaccard agreement over (entry, sentence) pairs across the whole file.
  std::size_t matched = 0, union_size = 0;
  for (const auto& entry : fixture) {
    std::multiset<std::string> reference;
    for (const auto& s : entry.at("sentences")) reference.insert(s.get<std::string>());
    const std::string text = entry.at("text").get<std::string>();
    std::multiset<std::string> ours;
    for (std::string_view s : split_sentences(text)) ours.insert(std::string(s));

    std::multiset<std::string> common;
    std::set_intersection(reference.begin(), reference.end(), ours.begin(), ours.end(),
                          std::inserter(common, common.begin()));
    matched += common.size();
    union_size += reference.size() + ours.size() - common.size();
  }
  double agreement = static_cast<double>(matched) / static_cast<double>(union_size);
  INFO("agreement ", agreement, " (", matched, "/", union_size, ")");
  CHECK(agreement >= 0.98);

  // The fixture includes the abbreviation case verbatim.
  bool has_dr_smith = false;
  for (const auto& entry : fixture)
    has_dr_smith = has_dr_smith ||
                   entry.at("text").get<std::string>().find("Dr. Smith") != std::string::npos;
  CHECK(has_dr_smith);
}

TEST_CASE("degenerate inputs yield empty unit lists, not errors") {
  CHECK(segment_units("", Level::Word).empty());
  CHECK(segment_units("   ", Level::Sentence).empty());
  CHECK(segment_units("\n\n\n", Level::Paragraph).empty());
  CHECK(unit_count("", Level::Char) == 0);
}
