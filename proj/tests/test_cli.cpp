#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

// Exit-code contract of the command-line driver: 0 success, 1 constraint
// failure or empty result, 2 usage/IO error.

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  std::string command = std::string(COLLIE_CLI_PATH) + " " + args +
                        " > /tmp/collie_cli_test.log 2>&1";
  int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string log_contents() {
  std::ifstream in("/tmp/collie_cli_test.log");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch() {
  auto dir = fs::temp_directory_path() / "collie_cli_scratch";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("extract rejects unknown structure ids with exit 2") {
  CHECK(run("extract --corpus /nowhere --structures bogus01 --out /tmp/x.jsonl") == 2);
  CHECK(log_contents().find("bogus01") != std::string::npos);
}

TEST_CASE("extract rejects an unreadable corpus with exit 2") {
  CHECK(run("extract --corpus /no/such/dir --out /tmp/x.jsonl") == 2);
}

TEST_CASE("check returns 0 for satisfied and 1 for violated generations") {
  auto dir = scratch();
  write_file(dir / "spec.json",
             R"({"level":"sentence","constraint":{"op":"count_units","selector":"xi",)"
             R"("level":"word","per_unit":"sentence","rel":"eq","bound":4}})");
  write_file(dir / "good.txt", "Exactly four words here.");
  write_file(dir / "bad.txt", "This one has five words.");
  write_file(dir / "empty.txt", "");

  CHECK(run("check --spec " + (dir / "spec.json").string() + " --generation " +
            (dir / "good.txt").string()) == 0);
  CHECK(run("check --spec " + (dir / "spec.json").string() + " --generation " +
            (dir / "bad.txt").string()) == 1);
  CHECK(run("check --spec " + (dir / "spec.json").string() + " --generation " +
            (dir / "empty.txt").string()) == 2);
}

TEST_CASE("check rejects malformed specs with exit 2") {
  auto dir = scratch();
  write_file(dir / "malformed.json", R"({"level":"page","constraint":{}})");
  write_file(dir / "gen.txt", "Whatever text.");
  CHECK(run("check --spec " + (dir / "malformed.json").string() + " --generation " +
            (dir / "gen.txt").string()) == 2);
}

TEST_CASE("render prints the instruction for a spec document") {
  auto dir = scratch();
  write_file(dir / "word01.json",
             R"({"level":"word","constraint":{"op":"count_units","selector":"xi",)"
             R"("level":"char","per_unit":"word","rel":"ge","bound":15}})");
  CHECK(run("render --spec " + (dir / "word01.json").string()) == 0);
  CHECK(log_contents() == "Please generate a word with at least 15 letters.\n");
}

TEST_CASE("run without credentials or mock exits 2") {
  auto dir = scratch();
  write_file(dir / "tiny.jsonl",
             "{\"meta\":{\"seed\":0,\"tool_version\":\"t\"}}\n"
             R"({"id":"a","structure":"word01","source":"s","spec":{"level":"word",)"
             R"("constraint":{"op":"count_units","selector":"xi","level":"char",)"
             R"("per_unit":"word","rel":"ge","bound":15}},"targets":{"min_letters":15},)"
             R"("example":"internationalization","prompt":"p"})"
             "\n");
  // The harness must not pick up ambient credentials for this case.
  CHECK(run("run --dataset " + (dir / "tiny.jsonl").string() +
            " --out /tmp/collie_cli_records.jsonl") == 2);
}

TEST_CASE("the abbreviation list is overridable from the command line") {
  auto dir = scratch();
  // A trivially satisfiable sentence-level spec; only the structural
  // one-sentence check can fail.
  write_file(dir / "spec.json",
             R"({"level":"sentence","constraint":{"op":"count_units","selector":"xi",)"
             R"("level":"word","per_unit":"sentence","rel":"ge","bound":0}})");
  write_file(dir / "gen.txt", "Dr. Smith left early.");
  write_file(dir / "no_abbrev.txt", "Mr.\n");

  CHECK(run("check --spec " + (dir / "spec.json").string() + " --generation " +
            (dir / "gen.txt").string()) == 0);
  // Without "Dr." in the list the text splits into two sentences.
  CHECK(run("--abbreviations " + (dir / "no_abbrev.txt").string() + " check --spec " +
            (dir / "spec.json").string() + " --generation " +
            (dir / "gen.txt").string()) == 1);
}

TEST_CASE("options can come from a config file") {
  auto dir = scratch();
  write_file(dir / "word01.json",
             R"({"level":"word","constraint":{"op":"count_units","selector":"xi",)"
             R"("level":"char","per_unit":"word","rel":"ge","bound":15}})");
  write_file(dir / "cli.cfg", "[render]\nspec=\"" + (dir / "word01.json").string() + "\"\n");
  CHECK(run("--config " + (dir / "cli.cfg").string() + " render") == 0);
  CHECK(log_contents() == "Please generate a word with at least 15 letters.\n");
}

TEST_CASE("report fails on empty records with exit 1") {
  auto dir = scratch();
  write_file(dir / "empty_records.jsonl", "");
  CHECK(run("report --records " + (dir / "empty_records.jsonl").string()) == 1);
}
