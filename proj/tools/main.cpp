#include <cstdlib>
#include <exception>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "steprl/harness.hpp"

namespace {

// Environment overrides sit between the config file and the command line:
// flags win over variables, variables win over the file.
std::optional<std::string> env_string(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') {
    return std::nullopt;
  }
  return std::string(value);
}

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const std::uint64_t value = std::stoull(text, &used);
    if (used != text.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error(what + " is not a valid seed: '" + text + "'");
  }
}

void apply_env_overrides(steprl::RunConfig& config) {
  if (const auto seed = env_string("STEPRL_SEED")) {
    config.seed = parse_seed(*seed, "STEPRL_SEED");
  }
  if (const auto out = env_string("STEPRL_OUT")) {
    config.out_dir = *out;
  }
}

void print_summary_row(std::ostream& out, const steprl::ExperimentSummary& s) {
  out << std::left << std::setw(20) << s.method << std::right << std::setw(8)
      << s.seed << std::setw(8) << s.rounds << std::setw(12)
      << s.final_tasks_above_60 << std::setw(12) << std::fixed
      << std::setprecision(3) << s.final_eval_success_rate << std::setw(12)
      << s.tasks_above_60_auc << std::setw(14) << s.total_env_steps << '\n';
}

void print_summary_header(std::ostream& out) {
  out << std::left << std::setw(20) << "method" << std::right << std::setw(8)
      << "seed" << std::setw(8) << "rounds" << std::setw(12) << "tasks>0.6"
      << std::setw(12) << "eval" << std::setw(12) << "auc" << std::setw(14)
      << "env_steps" << '\n';
}

int run_command(const std::string& config_path,
                const std::optional<std::string>& method,
                const std::optional<std::uint64_t>& seed,
                const std::optional<int>& rounds,
                const std::optional<std::string>& out_dir,
                const std::optional<std::string>& suite) {
  steprl::RunConfig config;
  if (!config_path.empty()) {
    config = steprl::load_config(config_path);
  }
  apply_env_overrides(config);
  if (method) {
    config.method = steprl::parse_method(*method);
  }
  if (seed) {
    config.seed = *seed;
  }
  if (rounds) {
    config.rounds = *rounds;
  }
  if (out_dir) {
    config.out_dir = *out_dir;
  }
  if (suite) {
    config.task_suite = *suite;
  }
  config.validate();
  if (config.out_dir.empty()) {
    throw std::runtime_error(
        "no output directory: set out_dir in the config, STEPRL_OUT, or --out");
  }

  const steprl::ExperimentResult result = steprl::run_experiment(config);
  print_summary_header(std::cout);
  print_summary_row(std::cout, result.summary);
  std::cout << "wrote " << config.out_dir << "/metrics.jsonl and summary.json\n";
  return 0;
}

int compare_command(const std::vector<std::string>& config_paths) {
  std::vector<steprl::ExperimentSummary> summaries;
  for (const std::string& path : config_paths) {
    steprl::RunConfig config = steprl::load_config(path);
    apply_env_overrides(config);
    if (config.out_dir.empty()) {
      throw std::runtime_error("config " + path + " has no out_dir set");
    }
    std::cout << "running " << path << " (" << steprl::method_name(config.method)
              << ", seed " << config.seed << ")...\n";
    summaries.push_back(steprl::run_experiment(config).summary);
  }
  std::cout << '\n';
  print_summary_header(std::cout);
  for (const steprl::ExperimentSummary& summary : summaries) {
    print_summary_row(std::cout, summary);
  }
  return 0;
}

std::vector<int> parse_lengths(const std::string& csv) {
  std::vector<int> lengths;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) {
      continue;
    }
    lengths.push_back(std::stoi(item));
  }
  if (lengths.empty()) {
    throw std::runtime_error("--lengths needs a comma-separated list of integers");
  }
  return lengths;
}

int suite_command(const std::string& out_path, int tasks, int alphabet,
                  int tolerance, const std::string& lengths_csv,
                  std::uint64_t seed) {
  const std::vector<int> lengths = lengths_csv.empty()
                                       ? steprl::default_length_pattern()
                                       : parse_lengths(lengths_csv);
  const auto suite =
      steprl::generate_suite(tasks, alphabet, tolerance, lengths, seed);
  steprl::save_suite(out_path, suite);
  std::cout << "wrote " << suite.size() << " tasks to " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Success-rate-guided step-level policy optimization testbed"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one training configuration");
  std::string run_config_path;
  std::optional<std::string> run_method;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_rounds;
  std::optional<std::string> run_out;
  std::optional<std::string> run_suite;
  run->add_option("--config", run_config_path, "Run config JSON file")
      ->check(CLI::ExistingFile);
  run->add_option("--method", run_method,
                  "Training method (tgrpo, gigrpo, step, step_no_srsampling, "
                  "step_no_stepaug, step_no_both)");
  run->add_option("--seed", run_seed, "Random seed");
  run->add_option("--rounds", run_rounds, "Training rounds (-1 derives from suite)");
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--suite", run_suite, "Task suite JSON file")
      ->check(CLI::ExistingFile);

  // compare
  auto* compare = app.add_subcommand(
      "compare", "Run several configurations and print a comparison table");
  std::vector<std::string> compare_configs;
  compare->add_option("--configs", compare_configs, "Run config JSON files")
      ->required()
      ->expected(-1)
      ->check(CLI::ExistingFile);

  // suite
  auto* suite = app.add_subcommand("suite", "Generate a task suite file");
  std::string suite_out;
  int suite_tasks = 64;
  int suite_alphabet = 5;
  int suite_tolerance = 2;
  std::string suite_lengths;
  std::uint64_t suite_seed = 20250815;
  suite->add_option("--out", suite_out, "Output path")->required();
  suite->add_option("--tasks", suite_tasks, "Number of tasks");
  suite->add_option("--alphabet", suite_alphabet, "Action alphabet size");
  suite->add_option("--tolerance", suite_tolerance, "Mistakes absorbed per episode");
  suite->add_option("--lengths", suite_lengths,
                    "Comma-separated target lengths, cycled over tasks");
  suite->add_option("--seed", suite_seed, "Suite generation seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(run_config_path, run_method, run_seed, run_rounds,
                         run_out, run_suite);
    }
    if (compare->parsed()) {
      return compare_command(compare_configs);
    }
    if (suite->parsed()) {
      return suite_command(suite_out, suite_tasks, suite_alphabet,
                           suite_tolerance, suite_lengths, suite_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
