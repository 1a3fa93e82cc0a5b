// subspace-doa: run the DOA learning-rule experiments and export CSV/JSON.
//
//   subspace-doa run --preset fig5 --out results/
//   subspace-doa run --config my.json [--seed N] [--trials N]
//   subspace-doa presets
//   subspace-doa show --preset fig8-9-noise-compare
//
// Exit codes: 0 success, 1 validation or I/O error, 2 every trial diverged.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "subspace_doa/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitAllDiverged = 2;

sdoa::ExperimentConfig load_config(const std::string& preset_name,
                                   const std::string& config_path) {
  if (!preset_name.empty()) return sdoa::preset(preset_name);
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot read config file " + config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + config_path + " is not valid JSON: " + e.what());
  }
  return sdoa::config_from_json(j);
}

void print_summary(const sdoa::ExperimentReport& report, std::ostream& os) {
  os << report.config.name << ": " << report.records.size() << " runs\n";
  os << std::left << std::setw(14) << "variant" << std::right << std::setw(8) << "trials"
     << std::setw(14) << "median_rmse" << std::setw(12) << "mean_rmse" << std::setw(12)
     << "converged" << std::setw(10) << "diverged" << '\n';
  for (const auto& s : report.summaries) {
    os << std::left << std::setw(14) << s.variant << std::right << std::setw(8) << s.trials
       << std::setw(14) << std::fixed << std::setprecision(3) << s.median_rmse << std::setw(12)
       << s.mean_rmse << std::setw(12) << s.convergence_rate << std::setw(10) << s.diverged
       << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural MCA/PCA subspace learning for DOA estimation"};
  app.require_subcommand(1);

  std::string preset_name;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run an experiment and write its outputs");
  auto* preset_opt = run->add_option("--preset", preset_name, "Built-in experiment preset");
  auto* config_opt = run->add_option("--config", config_path, "Experiment config JSON file");
  preset_opt->excludes(config_opt);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "Master seed (overrides noise.seed)");
  run->add_option("--trials", trials, "Number of trials (overrides num_trials)");
  run->add_flag("-q,--quiet", quiet, "Do not print the summary table");

  auto* show = app.add_subcommand("show", "Print the resolved config of a preset as JSON");
  show->add_option("--preset", preset_name, "Built-in experiment preset")->required();

  app.add_subcommand("presets", "List the built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (app.got_subcommand("presets")) {
    for (const auto& name : sdoa::preset_names()) std::cout << name << '\n';
    return kExitOk;
  }

  try {
    if (app.got_subcommand("show")) {
      std::cout << sdoa::to_json(sdoa::preset(preset_name)).dump(2) << '\n';
      return kExitOk;
    }

    if (preset_name.empty() && config_path.empty()) {
      std::cerr << "run: one of --preset or --config is required\n";
      return kExitInvalid;
    }
    auto config = load_config(preset_name, config_path);
    if (seed) config.noise.seed = *seed;
    if (trials) config.num_trials = *trials;
    if (!out_dir.empty()) config.output_dir = out_dir;

    auto report = sdoa::run_experiment(config);
    sdoa::emit_outputs(report, config.output_dir);
    if (!quiet) {
      print_summary(report, std::cout);
      std::cout << "outputs written to " << config.output_dir << '\n';
    }
    if (report.all_diverged()) {
      std::cerr << "every trial diverged; lower the learning rate\n";
      return kExitAllDiverged;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}
