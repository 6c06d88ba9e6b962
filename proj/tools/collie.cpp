// Command-line driver: extract -> render -> run -> check -> report.
//
// Exit codes: 0 success, 1 constraint failure or empty result, 2 usage or
// I/O error.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "collie/eval.hpp"
#include "collie/extract.hpp"
#include "collie/harness.hpp"
#include "collie/metrics.hpp"
#include "collie/render.hpp"
#include "collie/rng.hpp"
#include "collie/spec_json.hpp"
#include "collie/validate.hpp"
#include "collie/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string hex64(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << value;
  return out.str();
}

// Digest of a corpus input: file bytes, or every .txt under a directory.
std::string digest_path(const std::filesystem::path& path) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt")
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      h = collie::fnv1a64(file.filename().string(), h);
      h = collie::fnv1a64(read_file_or_throw(file), h);
    }
  } else {
    h = collie::fnv1a64(read_file_or_throw(path), h);
  }
  return hex64(h);
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct ExtractArgs {
  std::string corpus;
  std::string source = "wiki";
  std::string source_config;
  std::string word_list;
  std::string structures;
  std::string ranges;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t docs_per_source = 300;
  std::size_t chunks_per_doc = 100;
  std::size_t targets_per_structure = 100;
};

int cmd_extract(const ExtractArgs& args) {
  const auto& registry = collie::StructureRegistry::builtin();

  std::vector<std::string> structure_ids =
      args.structures.empty() ? registry.ids() : split_csv(args.structures);
  for (const std::string& id : structure_ids) {
    if (registry.find(id) == nullptr) {
      std::cerr << "error: unknown structure id \"" << id << "\"\n";
      return kExitUsage;
    }
  }

  std::vector<collie::SourceSpec> sources;
  std::vector<std::pair<std::string, std::string>> input_digests;

  if (!args.corpus.empty()) {
    collie::SourceSpec spec;
    if (!args.source_config.empty()) {
      spec.config = collie::SourceConfig::from_json(
          collie::json::parse(read_file_or_throw(args.source_config)));
    } else {
      auto config = collie::SourceConfig::builtin(args.source);
      if (!config) {
        std::cerr << "error: unknown source \"" << args.source
                  << "\" (expected wiki, ccnews, guten, or --source-config)\n";
        return kExitUsage;
      }
      spec.config = *config;
    }
    spec.path = args.corpus;
    if (!std::filesystem::exists(spec.path)) {
      std::cerr << "error: corpus path does not exist: " << args.corpus << "\n";
      return kExitUsage;
    }
    input_digests.emplace_back(spec.config.name, digest_path(spec.path));
    sources.push_back(std::move(spec));
  }
  if (!args.word_list.empty()) {
    collie::SourceSpec spec;
    spec.config.name = "words";
    spec.path = args.word_list;
    spec.word_list = true;
    if (!std::filesystem::exists(spec.path)) {
      std::cerr << "error: word list does not exist: " << args.word_list << "\n";
      return kExitUsage;
    }
    input_digests.emplace_back("words", digest_path(spec.path));
    sources.push_back(std::move(spec));
  }
  if (sources.empty()) {
    std::cerr << "error: provide --corpus and/or --word-list\n";
    return kExitUsage;
  }

  collie::ExtractOptions options;
  if (!args.ranges.empty())
    options.range_overrides = collie::json::parse(read_file_or_throw(args.ranges));

  collie::Caps caps;
  caps.docs_per_source = args.docs_per_source;
  caps.chunks_per_doc = args.chunks_per_doc;
  caps.targets_per_structure_per_source = args.targets_per_structure;

  collie::Dataset dataset =
      collie::assemble_dataset(sources, registry, structure_ids, caps, args.seed, options);
  dataset.meta.input_digests = std::move(input_digests);

  if (dataset.instances.empty()) {
    std::cerr << "error: no instances extracted\n";
    return kExitFailure;
  }
  collie::write_dataset_file(dataset, args.out);

  std::map<std::string, std::map<std::string, std::size_t>> counts;
  for (const auto& instance : dataset.instances)
    counts[instance.structure][instance.source] += 1;
  std::cout << "extracted " << dataset.instances.size() << " instances -> " << args.out
            << "\n";
  for (const auto& [structure, by_source] : counts) {
    std::cout << "  " << structure << ":";
    for (const auto& [source, n] : by_source) std::cout << " " << source << "=" << n;
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_render(const std::string& dataset_path, const std::string& spec_path) {
  if (!spec_path.empty()) {
    collie::ConstraintSpec spec = collie::parse_spec(read_file_or_throw(spec_path));
    auto violations = collie::validate(spec);
    if (!violations.empty()) {
      for (const auto& v : violations)
        std::cerr << "invalid spec: " << v.path << ": " << v.message << "\n";
      return kExitUsage;
    }
    std::cout << collie::render_instruction(spec) << "\n";
    return kExitOk;
  }
  collie::Dataset dataset = collie::read_dataset_file(dataset_path);
  for (const auto& instance : dataset.instances)
    std::cout << instance.id << "\t" << collie::render_instruction(instance.spec) << "\n";
  return kExitOk;
}

void print_report(const collie::EvalReport& report, const std::string& label) {
  std::cout << (label.empty() ? std::string("generation") : label) << ": "
            << (report.overall ? "SATISFIED" : "VIOLATED") << "\n";
  for (const auto& verdict : report.verdicts) {
    std::cout << "  [" << (verdict.satisfied ? "ok" : "FAIL") << "] " << verdict.detail
              << "\n";
  }
}

int cmd_check(const std::string& spec_path, const std::string& dataset_path,
              const std::string& generation_path, const std::string& report_path) {
  std::string generation_text = read_file_or_throw(generation_path);
  if (collie::trim(generation_text).empty()) {
    std::cerr << "error: generation file is empty\n";
    return kExitUsage;
  }

  bool all_ok = true;
  collie::json reports = collie::json::array();

  if (!spec_path.empty()) {
    collie::ConstraintSpec spec = collie::parse_spec(read_file_or_throw(spec_path));
    auto violations = collie::validate(spec);
    if (!violations.empty()) {
      for (const auto& v : violations)
        std::cerr << "invalid spec: " << v.path << ": " << v.message << "\n";
      return kExitUsage;
    }
    collie::EvalReport report = collie::check(spec, generation_text);
    print_report(report, "");
    reports.push_back(collie::report_to_json(report));
    all_ok = report.overall;
  } else {
    collie::Dataset dataset = collie::read_dataset_file(dataset_path);
    std::map<std::string, const collie::ConstraintInstance*> by_id;
    for (const auto& instance : dataset.instances) by_id[instance.id] = &instance;

    std::istringstream lines(generation_text);
    std::string line;
    std::size_t checked = 0;
    while (std::getline(lines, line)) {
      if (collie::trim(line).empty()) continue;
      collie::json record = collie::json::parse(line);
      std::string id = record.at("id").get<std::string>();
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        std::cerr << "error: unknown instance id \"" << id << "\"\n";
        return kExitUsage;
      }
      collie::EvalReport report =
          collie::check(it->second->spec, record.at("generation").get<std::string>());
      print_report(report, id);
      reports.push_back(collie::report_to_json(report));
      all_ok = all_ok && report.overall;
      ++checked;
    }
    if (checked == 0) {
      std::cerr << "error: no generations found\n";
      return kExitUsage;
    }
  }

  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    out << reports.dump(2) << "\n";
  }
  return all_ok ? kExitOk : kExitFailure;
}

struct RunArgs {
  std::string dataset;
  std::string out;
  std::string mock;
  std::string model;
  int trials = 1;
  double temperature = 0.7;
  int rounds = 1;
  int max_parallel = 1;
  int max_tokens = 1024;
  std::uint64_t seed = 0;
};

int cmd_run(const RunArgs& args) {
  collie::Dataset dataset = collie::read_dataset_file(args.dataset);
  if (dataset.instances.empty()) {
    std::cerr << "error: dataset is empty\n";
    return kExitFailure;
  }

  std::unique_ptr<collie::ModelClient> client;
  if (!args.mock.empty()) {
    if (args.mock == "echo-ground-truth") {
      client = collie::make_echo_ground_truth_client(dataset);
    } else if (args.mock == "constant-violator") {
      client = collie::make_constant_violator_client();
    } else if (args.mock == "scripted-feedback") {
      client = collie::make_scripted_feedback_client(dataset);
    } else {
      std::cerr << "error: unknown mock \"" << args.mock
                << "\" (echo-ground-truth, constant-violator, scripted-feedback)\n";
      return kExitUsage;
    }
  } else {
    auto config = collie::HttpClientConfig::from_env(
        args.model.empty() ? "gpt-3.5-turbo" : args.model);
    if (config.base_url.empty() || config.api_key.empty()) {
      std::cerr << "error: COLLIE_API_BASE and COLLIE_API_KEY must be set (or use "
                   "--mock)\n";
      return kExitUsage;
    }
    config.max_parallel = args.max_parallel;
    client = collie::make_http_client(std::move(config));
  }

  std::ofstream out(args.out, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << args.out << "\n";
    return kExitUsage;
  }
  collie::json meta;
  meta["tool_version"] = std::string(collie::kToolVersion);
  meta["seed"] = args.seed;
  meta["model"] = client->model_name();
  meta["temperature"] = args.temperature;
  meta["trials"] = args.trials;
  meta["rounds"] = args.rounds;
  meta["dataset_digest"] = digest_path(args.dataset);
  collie::json header;
  header["meta"] = std::move(meta);
  out << header.dump() << "\n";
  out.flush();

  std::size_t done = 0;
  collie::RunOptions options;
  options.trials = args.trials;
  options.temperature = args.temperature;
  options.rounds = args.rounds;
  options.max_parallel = args.max_parallel;
  options.max_tokens = args.max_tokens;
  options.on_record = [&](const collie::GenerationRecord& record) {
    out << collie::record_to_json(record).dump() << "\n";
    out.flush();  // crash-safe append
    ++done;
    if (done % 50 == 0) std::cerr << "  ..." << done << " records\n";
  };

  collie::RunResults results =
      args.rounds >= 2 ? collie::run_feedback_rounds(dataset, *client, options)
                       : collie::run_zero_shot(dataset, *client, options);

  auto overall = collie::success_rate(results.records, collie::GroupBy::Overall);
  double rate = overall.empty() ? 0.0 : overall.front().rate;
  std::cout << "records: " << results.records.size() << " (errored "
            << results.errored_trials << ", requests " << results.requests << ")\n";
  std::cout << "success rate: " << std::fixed << std::setprecision(3) << rate << "\n";
  if (results.aborted) {
    std::cerr << "error: run aborted, the endpoint stopped answering; partial records "
                 "kept in "
              << args.out << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

struct ReportArgs {
  std::string records;
  std::string k_list = "1";
  std::string group_by = "structure";
  std::string out;
  std::string csv;
  std::string word_list;
  bool naive_first_k = false;
};

int cmd_report(const ReportArgs& args) {
  std::ifstream in(args.records);
  if (!in) {
    std::cerr << "error: cannot read " << args.records << "\n";
    return kExitUsage;
  }
  std::vector<collie::GenerationRecord> records = collie::read_records(in);
  if (records.empty()) {
    std::cerr << "error: no records\n";
    return kExitFailure;
  }

  collie::GroupBy group_by = collie::GroupBy::Structure;
  if (args.group_by == "source") {
    group_by = collie::GroupBy::Source;
  } else if (args.group_by == "model") {
    group_by = collie::GroupBy::Model;
  } else if (args.group_by != "structure") {
    std::cerr << "error: --group-by must be structure, source, or model\n";
    return kExitUsage;
  }

  std::vector<int> ks;
  for (const std::string& k : split_csv(args.k_list)) ks.push_back(std::stoi(k));

  auto groups = collie::success_rate(records, group_by);
  auto overall = collie::success_rate(records, collie::GroupBy::Overall);
  auto curve = collie::pass_at_k(records, ks, args.naive_first_k);

  collie::json summary;
  collie::json meta;
  meta["tool_version"] = std::string(collie::kToolVersion);
  meta["records_digest"] = digest_path(args.records);
  meta["records"] = records.size();
  summary["meta"] = std::move(meta);

  collie::json table = collie::json::array();
  std::cout << std::left << std::setw(24) << args.group_by << std::right << std::setw(8)
            << "trials" << std::setw(10) << "rate" << std::setw(10) << "stderr" << "\n";
  for (const auto& group : groups) {
    collie::json row;
    row["group"] = group.key;
    row["trials"] = group.trials;
    row["successes"] = group.successes;
    row["rate"] = group.rate;
    row["std_error"] = group.std_error;
    table.push_back(std::move(row));
    std::cout << std::left << std::setw(24) << group.key << std::right << std::setw(8)
              << group.trials << std::setw(10) << std::fixed << std::setprecision(4)
              << group.rate << std::setw(10) << group.std_error << "\n";
  }
  if (!overall.empty()) {
    const auto& o = overall.front();
    collie::json row;
    row["group"] = "weighted_average";
    row["trials"] = o.trials;
    row["successes"] = o.successes;
    row["rate"] = o.rate;
    row["std_error"] = o.std_error;
    table.push_back(std::move(row));
    std::cout << std::left << std::setw(24) << "weighted_average" << std::right
              << std::setw(8) << o.trials << std::setw(10) << o.rate << std::setw(10)
              << o.std_error << "\n";
  }
  summary["success_rate"] = std::move(table);

  collie::json curve_json = collie::json::array();
  for (const auto& point : curve) {
    collie::json row;
    row["k"] = point.k;
    row["mean"] = point.mean;
    row["std_error"] = point.std_error;
    row["instances"] = point.instances;
    row["skipped"] = point.skipped;
    curve_json.push_back(std::move(row));
  }
  summary["pass_at_k"] = std::move(curve_json);

  auto rounds = collie::satisfaction_by_round(records);
  if (rounds.size() > 1) {
    collie::json rounds_json = collie::json::array();
    std::cout << "satisfaction by round:\n";
    for (const auto& stats : rounds) {
      collie::json row;
      row["round"] = stats.round;
      row["satisfied"] = stats.satisfied;
      row["rate"] = stats.rate;
      rounds_json.push_back(std::move(row));
      std::cout << "  round " << stats.round << ": " << std::fixed
                << std::setprecision(4) << stats.rate << "\n";
    }
    summary["satisfaction_by_round"] = std::move(rounds_json);
  }

  if (!args.word_list.empty()) {
    auto stats = collie::word_validity(records, collie::load_word_list(args.word_list));
    collie::json wv;
    wv["considered"] = stats.considered;
    wv["valid"] = stats.valid;
    wv["fraction"] = stats.fraction;
    summary["word_validity"] = std::move(wv);
    std::cout << "word validity: " << stats.valid << "/" << stats.considered << " = "
              << std::fixed << std::setprecision(4) << stats.fraction << "\n";
  }

  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary);
    out << summary.dump(2) << "\n";
  }
  if (!args.csv.empty()) {
    std::ofstream csv(args.csv, std::ios::binary);
    csv << "model,k,mean,std_error,instances\n";
    std::string model = records.front().model;
    for (const auto& point : curve) {
      csv << model << "," << point.k << "," << point.mean << "," << point.std_error << ","
          << point.instances << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grammar-based constrained text generation benchmark tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(collie::kToolVersion));
  app.set_config("--config", "", "Read options from a config file (flag names as keys)");

  std::string abbreviations_path;
  app.add_option("--abbreviations", abbreviations_path,
                 "Sentence-splitter abbreviation list (one entry per line)")
      ->expected(1);

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract", "Mine constraint instances from a corpus");
  extract->add_option("--corpus", extract_args.corpus, "Corpus directory of .txt or a .jsonl file");
  extract->add_option("--source", extract_args.source, "Built-in source config: wiki, ccnews, guten");
  extract->add_option("--source-config", extract_args.source_config, "Custom source config (JSON file)");
  extract->add_option("--word-list", extract_args.word_list, "Word list for word-level structures");
  extract->add_option("--structures", extract_args.structures, "Comma-separated structure ids (default: all)");
  extract->add_option("--ranges", extract_args.ranges, "JSON file overriding admissible ranges");
  extract->add_option("--out", extract_args.out, "Output dataset (JSONL)")->required();
  extract->add_option("--seed", extract_args.seed, "Sampling seed");
  extract->add_option("--docs-per-source", extract_args.docs_per_source, "Documents sampled per source");
  extract->add_option("--chunks-per-doc", extract_args.chunks_per_doc, "Chunks sampled per document");
  extract->add_option("--targets-per-structure", extract_args.targets_per_structure,
                      "Targets kept per structure per source");

  std::string render_dataset, render_spec;
  auto* render = app.add_subcommand("render", "Render instructions for a dataset or a spec");
  render->add_option("--dataset", render_dataset, "Dataset file (JSONL)");
  render->add_option("--spec", render_spec, "Single spec document (JSON)");

  std::string check_spec, check_dataset, check_generation, check_report;
  auto* check = app.add_subcommand("check", "Judge generations against specs");
  check->add_option("--spec", check_spec, "Spec document (JSON)");
  check->add_option("--dataset", check_dataset, "Dataset file (JSONL)");
  check->add_option("--generation", check_generation,
                    "Generation text file (or JSONL of {id, generation} with --dataset)")
      ->required();
  check->add_option("--report", check_report, "Write JSON reports here");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Query a model over a dataset and judge trials");
  run->add_option("--dataset", run_args.dataset, "Dataset file (JSONL)")->required();
  run->add_option("--out", run_args.out, "Records output (JSONL)")->required();
  auto* run_mock = run->add_option(
      "--mock", run_args.mock,
      "Offline client: echo-ground-truth, constant-violator, scripted-feedback");
  run->add_option("--model", run_args.model, "Model name for the HTTP client")
      ->excludes(run_mock);
  run->add_option("--trials", run_args.trials, "Independent samples per instance");
  run->add_option("--temperature", run_args.temperature, "Sampling temperature");
  run->add_option("--rounds", run_args.rounds, "Total rounds; 2+ enables feedback mode");
  run->add_option("--max-parallel", run_args.max_parallel, "Concurrent requests");
  run->add_option("--max-tokens", run_args.max_tokens, "Completion token limit");
  run->add_option("--seed", run_args.seed, "Recorded in the output header");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Summarize a records file");
  report->add_option("--records", report_args.records, "Records file (JSONL)")->required();
  report->add_option("--k", report_args.k_list, "Comma-separated k values");
  report->add_option("--group-by", report_args.group_by, "structure, source, or model");
  report->add_option("--out", report_args.out, "Summary JSON output");
  report->add_option("--csv", report_args.csv, "pass@k curve as CSV plot data");
  report->add_option("--word-list", report_args.word_list, "Word list for validity scoring");
  report->add_flag("--naive-first-k", report_args.naive_first_k,
                   "Use the empirical first-k rate instead of the unbiased estimator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!abbreviations_path.empty())
      collie::AbbreviationSet::set_default(
          collie::AbbreviationSet::load_file(abbreviations_path));
    if (extract->parsed()) return cmd_extract(extract_args);
    if (render->parsed()) {
      if (render_dataset.empty() == render_spec.empty()) {
        std::cerr << "error: provide exactly one of --dataset or --spec\n";
        return kExitUsage;
      }
      return cmd_render(render_dataset, render_spec);
    }
    if (check->parsed()) {
      if (check_spec.empty() == check_dataset.empty()) {
        std::cerr << "error: provide exactly one of --spec or --dataset\n";
        return kExitUsage;
      }
      return cmd_check(check_spec, check_dataset, check_generation, check_report);
    }
    if (run->parsed()) return cmd_run(run_args);
    if (report->parsed()) return cmd_report(report_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
