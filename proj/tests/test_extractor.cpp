#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "collie/eval.hpp"
#include "collie/extract.hpp"
#include "collie/segment.hpp"

using namespace collie;

namespace {

Chunk make_chunk(Level level, std::string text) {
  return Chunk{"doc", level, std::move(text), "test", 0};
}

const StructureTemplate& tmpl(const std::string& id) {
  const auto* t = StructureRegistry::builtin().find(id);
  REQUIRE(t != nullptr);
  return *t;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("collie_extract_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("direct extraction fills sent02 from a ten-word sentence") {
  Chunk chunk = make_chunk(Level::Sentence,
                           "Soft light fell across the beach while gulls chased math.");
  REQUIRE(segment_units(chunk.text, Level::Word).size() == 10);

  auto results = extract_targets(tmpl("sent02"), chunk, 7);
  REQUIRE(results.size() == 1);
  const json& targets = results[0];
  CHECK(targets.at("n").get<int>() == 10);
  REQUIRE(targets.at("words").size() == 3);

  auto words = segment_units(chunk.text, Level::Word);
  for (const auto& [key, value] : targets.at("words").items()) {
    int pos = std::stoi(key);
    REQUIRE(pos >= 1);
    REQUIRE(pos <= 10);
    CHECK(normalize_word(words[pos - 1]) == value.get<std::string>());
  }
  // Soundness: the source sentence satisfies the instantiated spec.
  CHECK(check(instantiate(tmpl("sent02"), targets), chunk.text).overall);
}

TEST_CASE("extraction respects admissible ranges") {
  CHECK(extract_targets(tmpl("word01"), make_chunk(Level::Word, "cat"), 1).empty());
  auto ok = extract_targets(tmpl("word01"),
                            make_chunk(Level::Word, "internationalization"), 1);
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].at("min_letters").get<int>() == 20);

  // sent01 requires 50..150 characters.
  CHECK(extract_targets(tmpl("sent01"), make_chunk(Level::Sentence, "Too short."), 1)
            .empty());
  Chunk long_enough = make_chunk(
      Level::Sentence,
      "The quiet machine hummed along the narrow hallway while engineers took notes.");
  auto results = extract_targets(tmpl("sent01"), long_enough, 1);
  REQUIRE(results.size() == 1);
  CHECK(results[0].at("chars").get<std::int64_t>() == count_chars(long_enough.text));
}

TEST_CASE("range overrides widen or narrow admissibility") {
  ExtractOptions options;
  options.range_overrides = json::parse(R"({"word01": {"min_letters": [3, 5]}})");
  auto results =
      extract_targets(tmpl("word01"), make_chunk(Level::Word, "cat"), 1, options);
  REQUIRE(results.size() == 1);
  CHECK(results[0].at("min_letters").get<int>() == 3);
}

TEST_CASE("word02 extraction reads letters off the word itself") {
  auto results = extract_targets(tmpl("word02"), make_chunk(Level::Word, "scratchier"), 3);
  REQUIRE(results.size() == 1);
  const json& targets = results[0];
  CHECK(targets.at("len").get<int>() == 10);
  const std::string word = "scratchier";
  for (const auto& [key, value] : targets.at("letters").items()) {
    int pos = std::stoi(key);
    CHECK(pos != 2);  // position 2 is excluded from sampling
    CHECK(std::string(1, word[pos - 1]) == value.get<std::string>());
  }
  CHECK(check(instantiate(tmpl("word02"), targets), word).overall);
}

TEST_CASE("word03 takes the measured length and final letter") {
  auto results = extract_targets(tmpl("word03"), make_chunk(Level::Word, "doctor"), 1);
  REQUIRE(results.size() == 1);
  CHECK(results[0].at("max_letters").get<int>() == 6);
  CHECK(results[0].at("last").get<std::string>() == "r");
  // Eleven letters is outside the range.
  CHECK(extract_targets(tmpl("word03"), make_chunk(Level::Word, "watermelons"), 1)
            .empty());
}

TEST_CASE("para02 sweep keeps only combinations the paragraph satisfies") {
  Chunk clean = make_chunk(
      Level::Paragraph,
      "Birds sang at dawn. Light spread across quiet fields. Nothing stirred for a "
      "while. Morning arrived gently.");
  auto results = extract_targets(tmpl("para02"), clean, 5);
  REQUIRE(results.size() == 1);
  CHECK(results[0].at("min_sentences").get<int>() == 4);
  CHECK(results[0].at("forbidden") == json::array({"the", "and", "of"}));

  Chunk with_the = make_chunk(
      Level::Paragraph,
      "Birds sang at dawn. The light spread out. Nothing stirred for a while. Morning "
      "arrived gently.");
  CHECK(extract_targets(tmpl("para02"), with_the, 5).empty());

  CHECK(extract_targets(tmpl("para02"), make_chunk(Level::Paragraph, ""), 5).empty());
}

TEST_CASE("para01 requires a shared first word across sentences") {
  Chunk shared = make_chunk(Level::Paragraph,
                            "Soft rain fell all night. Soft light followed at dawn.");
  auto results = extract_targets(tmpl("para01"), shared, 2);
  REQUIRE(results.size() == 1);
  CHECK(results[0].at("word").get<std::string>() == "soft");

  Chunk differing = make_chunk(Level::Paragraph,
                               "Soft rain fell all night. Hard light followed at dawn.");
  CHECK(extract_targets(tmpl("para01"), differing, 2).empty());
}

TEST_CASE("para05 and pass01 capture the actual endings") {
  Chunk para = make_chunk(Level::Paragraph,
                          "Students in this course love math. Fans of loud guitars love rock.");
  auto results = extract_targets(tmpl("para05"), para, 4);
  REQUIRE(results.size() == 1);
  CHECK(results[0].at("last_words") == json::array({"math", "rock"}));

  Chunk pass = make_chunk(Level::Passage,
                          "Morning begins slowly here. I sit.\n\nEvenings close in fast. I cry.");
  auto pass_results = extract_targets(tmpl("pass01"), pass, 4);
  REQUIRE(pass_results.size() == 1);
  CHECK(pass_results[0].at("last_sentences") == json::array({"I sit.", "I cry."}));
  CHECK(check(instantiate(tmpl("pass01"), pass_results[0]), pass.text).overall);
}

TEST_CASE("string targets never carry punctuation at their edges") {
  // The final word of each sentence normalizes cleanly even with commas and
  // periods attached; a pure-punctuation ending kills the candidate.
  Chunk para = make_chunk(Level::Paragraph, "They kept going. It never stopped --");
  CHECK(extract_targets(tmpl("para05"), para, 4).empty());
}

TEST_CASE("assemble_dataset is deterministic and respects caps") {
  auto dir = temp_dir("corpus");
  for (int d = 0; d < 6; ++d) {
    std::ofstream out(dir / ("doc" + std::to_string(d) + ".txt"));
    for (int p = 0; p < 4; ++p) {
      out << "Soft winds drift over the warm sand near paragraph " << d << p << ". ";
      out << "Waves arrive slowly and settle back again without any hurry at all. ";
      out << "Gulls wheel overhead calling while children build small castles below. ";
      out << "Evening light turns the water gold as the crowd thins out for dinner.\n\n";
    }
  }
  auto words_file = dir / "words.txt";
  {
    std::ofstream out(words_file);
    out << "internationalization\ncompartmentalization\nscratchier\ndoctor\nbetter\n"
           "smaller\nquieter\nwonderful\nbeautiful\nmountains\n";
  }

  std::vector<SourceSpec> sources;
  SourceSpec text_source;
  text_source.config = SourceConfig::wiki();
  text_source.path = dir;
  sources.push_back(text_source);
  SourceSpec word_source;
  word_source.config.name = "words";
  word_source.path = words_file;
  word_source.word_list = true;
  sources.push_back(word_source);

  Caps caps;
  caps.targets_per_structure_per_source = 3;
  std::vector<std::string> ids = {"word01", "word03", "sent02", "para04"};

  Dataset a = assemble_dataset(sources, StructureRegistry::builtin(), ids, caps, 11);
  Dataset b = assemble_dataset(sources, StructureRegistry::builtin(), ids, caps, 11);

  std::ostringstream dump_a, dump_b;
  write_dataset(a, dump_a);
  write_dataset(b, dump_b);
  CHECK(dump_a.str() == dump_b.str());

  std::map<std::string, std::size_t> per_structure_source;
  for (const auto& instance : a.instances) {
    per_structure_source[instance.structure + "/" + instance.source] += 1;
    CHECK(check(instance.spec, instance.example).overall);
    CHECK(!instance.prompt.empty());
  }
  for (const auto& [key, count] : per_structure_source) {
    INFO(key);
    CHECK(count <= caps.targets_per_structure_per_source);
  }
  CHECK(!a.instances.empty());

  SUBCASE("dataset files round-trip") {
    auto file = dir / "dataset.jsonl";
    write_dataset_file(a, file);
    Dataset reread = read_dataset_file(file);
    CHECK(reread.meta.seed == a.meta.seed);
    REQUIRE(reread.instances.size() == a.instances.size());
    for (std::size_t i = 0; i < a.instances.size(); ++i) {
      CHECK(reread.instances[i].id == a.instances[i].id);
      CHECK(reread.instances[i].spec == a.instances[i].spec);
      CHECK(reread.instances[i].targets == a.instances[i].targets);
    }
  }

  SUBCASE("unknown structure ids are rejected") {
    CHECK_THROWS_AS(
        assemble_dataset(sources, StructureRegistry::builtin(), {"nope"}, caps, 1),
        ExtractError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("duplicate targets within a source are dropped") {
  auto dir = temp_dir("dedup");
  {
    std::ofstream out(dir / "doc0.txt");
    // Two identical-length words in one doc give identical word01 targets.
    out << "Some sentence long enough to matter here.";
  }
  auto words_file = dir / "w.txt";
  {
    std::ofstream out(words_file);
    out << "internationalization\ncompartmentalization\n";  // both 20 letters
  }
  std::vector<SourceSpec> sources;
  SourceSpec word_source;
  word_source.config.name = "words";
  word_source.path = words_file;
  word_source.word_list = true;
  sources.push_back(word_source);

  Dataset dataset =
      assemble_dataset(sources, StructureRegistry::builtin(), {"word01"}, Caps{}, 5);
  CHECK(dataset.instances.size() == 1);  // {min_letters: 20} deduplicated
  std::filesystem::remove_all(dir);
}
