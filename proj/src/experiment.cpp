#include "subspace_doa/experiment.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "subspace_doa/eigen_oracle.hpp"

namespace sdoa {

namespace {

constexpr std::uint64_t kNoiseStream = 0;
constexpr std::uint64_t kInitStream = 1;

ExperimentConfig two_source_setup() {
  ExperimentConfig c;
  c.geometry = {8, 0.5, AngleReference::axis};
  c.sources = {{60.0, 0.35, 1.0}, {100.0, 0.36, 1.0}};
  c.num_snapshots = 5;
  c.noise = {0.009, 1};
  c.rule = UpdateRule::mca_stabilized;
  c.learning.eta = 0.01;
  c.learning.beta = 1.0;
  c.learning.max_epochs = 5000;
  c.learning.convergence_tol = 1e-5;
  c.learning.divergence_norm_cap = 1e3;
  c.learning.num_neurons = 0;
  c.learning.stop_on_convergence = true;
  c.grid = {0.0, 180.0, 0.5};
  c.num_trials = 20;
  c.trace_stride = 10;
  return c;
}

ExperimentConfig lr_sweep() {
  auto c = two_source_setup();
  c.name = "fig2-lr-sweep";
  c.num_trials = 1;
  c.learning.num_neurons = 1;
  c.learning.max_epochs = 1000;
  c.learning.stop_on_convergence = false;
  c.trace_stride = 1;
  c.variants = {{"eta=0.01", std::nullopt, 0.01, std::nullopt},
                {"eta=0.1", std::nullopt, 0.1, std::nullopt}};
  return c;
}

ExperimentConfig snapshot_sweep(std::string name, UpdateRule rule, std::vector<int> lengths) {
  auto c = two_source_setup();
  c.name = std::move(name);
  c.rule = rule;
  for (int l : lengths) {
    c.variants.push_back({"L=" + std::to_string(l), std::nullopt, std::nullopt, l});
  }
  return c;
}

ExperimentConfig noise_compare(std::string name, std::vector<UpdateRule> rules) {
  auto c = two_source_setup();
  c.name = std::move(name);
  // Equal presentation budget for every arm.
  c.learning.stop_on_convergence = false;
  for (auto rule : rules) {
    c.variants.push_back(
        {rule == UpdateRule::gha ? "pca" : "mca", rule, std::nullopt, std::nullopt});
  }
  return c;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int default_neurons(const ExperimentConfig& c, UpdateRule rule) {
  if (c.learning.num_neurons > 0) return c.learning.num_neurons;
  const int sources = static_cast<int>(c.sources.size());
  return is_minor_rule(rule) ? c.geometry.num_sensors - sources : sources;
}

ConvergenceTrace decimate(ConvergenceTrace trace, int stride) {
  if (stride <= 1 || trace.records.empty()) return trace;
  ConvergenceTrace out;
  const std::size_t n = trace.records.size();
  for (std::size_t i = 0; i < n; ++i) {
    if ((i + 1) % static_cast<std::size_t>(stride) == 0 || i + 1 == n) {
      out.records.push_back(std::move(trace.records[i]));
    }
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  geometry.validate();
  if (sources.empty()) throw std::invalid_argument("experiment needs at least one source");
  for (const auto& s : sources) s.validate();
  const int m = geometry.num_sensors;
  const int l = static_cast<int>(sources.size());
  if (l >= m) throw std::invalid_argument("source count must be smaller than sensor count");
  if (num_snapshots < 1) throw std::invalid_argument("num_snapshots must be >= 1");
  noise.validate();

  LearningConfig probe = learning;
  if (probe.num_neurons == 0) probe.num_neurons = 1;
  probe.validate();
  if (learning.num_neurons >= m) {
    throw std::invalid_argument("num_neurons must be smaller than the sensor count");
  }
  grid.validate();
  if (num_trials < 1) throw std::invalid_argument("num_trials must be >= 1");
  if (trace_stride < 1) throw std::invalid_argument("trace_stride must be >= 1");

  std::set<std::string> labels;
  for (const auto& v : variants) {
    if (v.label.empty()) throw std::invalid_argument("variant label must be nonempty");
    if (!labels.insert(v.label).second) {
      throw std::invalid_argument("duplicate variant label '" + v.label + "'");
    }
    if (v.eta && !(*v.eta > 0.0 && *v.eta < 1.0)) {
      throw std::invalid_argument("variant '" + v.label + "': eta must lie in (0, 1)");
    }
    if (v.num_snapshots && *v.num_snapshots < 1) {
      throw std::invalid_argument("variant '" + v.label + "': num_snapshots must be >= 1");
    }
  }
}

std::vector<ExperimentVariant> ExperimentConfig::resolved_variants() const {
  std::vector<ExperimentVariant> arms =
      variants.empty() ? std::vector<ExperimentVariant>{{"base", {}, {}, {}}} : variants;
  for (auto& arm : arms) {
    if (!arm.rule) arm.rule = rule;
    if (!arm.eta) arm.eta = learning.eta;
    if (!arm.num_snapshots) arm.num_snapshots = num_snapshots;
  }
  return arms;
}

std::vector<std::string> preset_names() {
  return {"fig2-lr-sweep", "fig4-5-mca-snapshots", "fig6-7-pca-snapshots",
          "fig8-9-noise-compare", "fig2", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
}

ExperimentConfig preset(std::string_view name) {
  if (name == "fig2-lr-sweep" || name == "fig2") {
    auto c = lr_sweep();
    c.name = std::string(name);
    return c;
  }
  if (name == "fig4-5-mca-snapshots") {
    return snapshot_sweep(std::string(name), UpdateRule::mca_stabilized, {2, 5});
  }
  if (name == "fig6-7-pca-snapshots") {
    return snapshot_sweep(std::string(name), UpdateRule::gha, {2, 5});
  }
  if (name == "fig8-9-noise-compare") {
    return noise_compare(std::string(name), {UpdateRule::gha, UpdateRule::mca_stabilized});
  }
  if (name == "fig4") return snapshot_sweep("fig4", UpdateRule::mca_stabilized, {2});
  if (name == "fig5") return snapshot_sweep("fig5", UpdateRule::mca_stabilized, {5});
  if (name == "fig6") return snapshot_sweep("fig6", UpdateRule::gha, {2});
  if (name == "fig7") return snapshot_sweep("fig7", UpdateRule::gha, {5});
  if (name == "fig8") return noise_compare("fig8", {UpdateRule::gha});
  if (name == "fig9") return noise_compare("fig9", {UpdateRule::mca_stabilized});
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::string_view to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::converged: return "converged";
    case TrialStatus::budget_exhausted: return "budget_exhausted";
    case TrialStatus::diverged: return "diverged";
  }
  return "unknown";
}

bool ExperimentReport::all_diverged() const {
  return !records.empty() && std::all_of(records.begin(), records.end(), [](const auto& r) {
    return r.status == TrialStatus::diverged;
  });
}

const VariantSummary& ExperimentReport::summary(std::string_view variant) const {
  for (const auto& s : summaries) {
    if (s.variant == variant) return s;
  }
  throw std::out_of_range("no variant '" + std::string(variant) + "' in report");
}

std::vector<VariantSummary> summarize(const std::vector<TrialRecord>& records) {
  std::vector<VariantSummary> out;
  std::vector<std::string> order;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.variant) == order.end()) {
      order.push_back(r.variant);
    }
  }
  for (const auto& label : order) {
    VariantSummary s;
    s.variant = label;
    std::vector<double> rmse;
    int converged = 0;
    for (const auto& r : records) {
      if (r.variant != label) continue;
      ++s.trials;
      rmse.push_back(r.angle_rmse);
      converged += r.converged ? 1 : 0;
      s.diverged += r.status == TrialStatus::diverged ? 1 : 0;
    }
    s.median_rmse = median(rmse);
    s.mean_rmse = std::accumulate(rmse.begin(), rmse.end(), 0.0) / static_cast<double>(rmse.size());
    s.convergence_rate = static_cast<double>(converged) / static_cast<double>(s.trials);
    out.push_back(s);
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();

  ExperimentReport report;
  report.config = config;

  std::vector<double> truth;
  for (const auto& s : config.sources) truth.push_back(s.doa_deg);
  const int num_sources = static_cast<int>(config.sources.size());
  const int m = config.geometry.num_sensors;

  for (const auto& arm : config.resolved_variants()) {
    const UpdateRule rule = *arm.rule;
    const bool minor = is_minor_rule(rule);

    LearningConfig learning = config.learning;
    learning.eta = *arm.eta;
    learning.num_neurons = default_neurons(config, rule);
    const int reference_dim = minor ? m - num_sources : num_sources;

    for (int t = 0; t < config.num_trials; ++t) {
      const std::uint64_t child = derive_seed(config.noise.seed, static_cast<std::uint64_t>(t));
      const NoiseSpec noise{config.noise.sigma, derive_seed(child, kNoiseStream)};
      learning.seed = derive_seed(child, kInitStream);

      const auto snapshots =
          synthesize_snapshots(config.geometry, config.sources, *arm.num_snapshots, noise);
      const auto oracle = eigendecompose(sample_covariance(snapshots));

      TrialRecord record;
      record.variant = arm.label;
      record.trial = t;
      record.seed = child;

      TrialArtifacts artifacts;
      artifacts.variant = arm.label;
      artifacts.trial = t;
      artifacts.method = minor ? "mca" : "pca";

      try {
        auto trained = train(snapshots, rule, learning, oracle, reference_dim);
        record.converged = trained.converged;
        record.status = trained.converged ? TrialStatus::converged : TrialStatus::budget_exhausted;
        record.iterations = trained.iterations;

        const auto bases = reference_bases(oracle, rule, learning.num_neurons, reference_dim);
        for (int j = 0; j < learning.num_neurons; ++j) {
          record.direction_errors.push_back(direction_error(trained.weights.neuron(j), bases[j]));
        }

        artifacts.spectrum =
            minor ? mca_spectrum(config.geometry, noise_subspace_from_weights(trained.weights),
                                 config.grid)
                  : pca_spectrum(config.geometry, signal_subspace_from_weights(trained.weights),
                                 config.grid);
        const auto peaks = find_peaks(*artifacts.spectrum, static_cast<std::size_t>(num_sources));
        record.peak_angles_deg = peaks.angles_deg;
        record.peak_values = peaks.values;
        record.angle_rmse = angle_rmse(peaks, truth);
        artifacts.trace = decimate(std::move(trained.trace), config.trace_stride);
      } catch (const DivergenceError& e) {
        record.status = TrialStatus::diverged;
        record.converged = false;
        record.iterations = e.iteration();
        record.angle_rmse = angle_rmse(PeakSet{}, truth);
      }

      report.records.push_back(std::move(record));
      report.artifacts.push_back(std::move(artifacts));
    }
  }

  report.summaries = summarize(report.records);
  return report;
}

}  // namespace sdoa
