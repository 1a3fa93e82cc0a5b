#ifndef SUBSPACE_DOA_EXPERIMENT_HPP
#define SUBSPACE_DOA_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "subspace_doa/array_signal.hpp"
#include "subspace_doa/doa_spectrum.hpp"
#include "subspace_doa/subspace_learning.hpp"

namespace sdoa {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// child = splitmix64(splitmix64(parent) ^ index). Depends only on the pair,
/// so adding trials never perturbs earlier ones.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(splitmix64(parent) ^ index);
}

/// One arm of a sweep. Unset fields inherit from the enclosing config.
struct ExperimentVariant {
  std::string label;
  std::optional<UpdateRule> rule;
  std::optional<double> eta;
  std::optional<int> num_snapshots;
};

inline LearningConfig auto_neurons() {
  LearningConfig l;
  l.num_neurons = 0;
  return l;
}

struct ExperimentConfig {
  std::string name = "custom";
  ArrayGeometry geometry;
  std::vector<SourceSpec> sources;
  int num_snapshots = 5;
  /// noise.seed is the master seed of the experiment.
  NoiseSpec noise;
  UpdateRule rule = UpdateRule::mca_stabilized;
  /// learning.seed is ignored; per-trial seeds are derived from noise.seed.
  /// num_neurons == 0 selects m - l for MCA rules and l for GHA.
  LearningConfig learning = auto_neurons();
  AngleGrid grid;
  int num_trials = 1;
  /// Keep every k-th trace row in trace.csv (the last row is always kept).
  int trace_stride = 1;
  std::string output_dir = "results";
  /// Empty means a single arm labelled "base".
  std::vector<ExperimentVariant> variants;

  void validate() const;
  /// The arms actually run, with overrides resolved.
  std::vector<ExperimentVariant> resolved_variants() const;
};

/// Names: fig2-lr-sweep, fig4-5-mca-snapshots, fig6-7-pca-snapshots,
/// fig8-9-noise-compare, and the single-arm figures fig2, fig4 .. fig9.
/// Throws std::invalid_argument for anything else.
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

enum class TrialStatus { converged, budget_exhausted, diverged };
std::string_view to_string(TrialStatus status);

struct TrialRecord {
  std::string variant;
  int trial = 0;
  std::uint64_t seed = 0;
  TrialStatus status = TrialStatus::budget_exhausted;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> direction_errors;
  std::vector<double> peak_angles_deg;
  std::vector<double> peak_values;
  double angle_rmse = 0.0;
};

/// Spectrum and trace of one trial; exported to CSV, not to report.json.
struct TrialArtifacts {
  std::string variant;
  int trial = 0;
  std::string method;
  std::optional<SpectrumGrid> spectrum;
  ConvergenceTrace trace;
};

struct VariantSummary {
  std::string variant;
  int trials = 0;
  double median_rmse = 0.0;
  double mean_rmse = 0.0;
  double convergence_rate = 0.0;
  int diverged = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> records;
  std::vector<VariantSummary> summaries;
  std::vector<TrialArtifacts> artifacts;
  std::vector<std::string> files;

  bool all_diverged() const;
  const VariantSummary& summary(std::string_view variant) const;
};

/// Per-variant aggregates recomputed from the records.
std::vector<VariantSummary> summarize(const std::vector<TrialRecord>& records);

/// Runs every (variant, trial) pair. Diverged trials are recorded with no
/// peaks. Nothing is written to disk.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes spectrum.csv, trace.csv, report.json and config.json into `dir`,
/// records the file names in `report.files`, and returns their paths.
std::vector<std::filesystem::path> emit_outputs(ExperimentReport& report,
                                                const std::filesystem::path& dir);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentReport& report);

}  // namespace sdoa

#endif  // SUBSPACE_DOA_EXPERIMENT_HPP
