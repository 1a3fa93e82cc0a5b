#ifndef SUBSPACE_DOA_SUBSPACE_LEARNING_HPP
#define SUBSPACE_DOA_SUBSPACE_LEARNING_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "subspace_doa/array_signal.hpp"
#include "subspace_doa/eigen_oracle.hpp"

namespace sdoa {

/// Online learning rules. Neuron output is y_j = w_j^H x throughout.
enum class UpdateRule {
  gha,             ///< generalized Hebbian (Sanger) PCA
  mca_single,      ///< w <- w - eta conj(y) (x + y w)
  mca_stabilized,  ///< anti-Hebbian with a (|w|^2 - 1) penalty
  mca_multi,       ///< layered MCA with a lower-triangular competitive sum
};

std::string_view to_string(UpdateRule rule);
/// Accepts "gha", "mca_single", "mca_stabilized", "mca_multi".
std::optional<UpdateRule> parse_update_rule(std::string_view name);

/// True for the rules that seek minor components.
constexpr bool is_minor_rule(UpdateRule rule) { return rule != UpdateRule::gha; }

struct LearningConfig {
  double eta = 0.01;
  double beta = 1.0;
  int max_epochs = 5000;
  double convergence_tol = 0.02;
  std::uint64_t seed = 0;
  double divergence_norm_cap = 1e3;
  int num_neurons = 1;
  /// When false, training always runs the full max_epochs budget.
  bool stop_on_convergence = true;

  void validate() const;
};

/// Row j holds neuron j's weight vector w_j (l x m).
struct WeightMatrix {
  cmat rows;

  int num_neurons() const { return static_cast<int>(rows.rows()); }
  int dim() const { return static_cast<int>(rows.cols()); }
  cvec neuron(int j) const { return rows.row(j).transpose(); }
};

struct TraceRecord {
  std::size_t iteration = 0;
  std::vector<double> direction_error;
  std::vector<double> norm_dev;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

// Single-presentation updates. All throw std::invalid_argument on a length
// mismatch between the weights and x.

WeightMatrix gha_update(const WeightMatrix& w, const cvec& x, double eta);
cvec mca_update_single(const cvec& w, const cvec& x, double eta);
cvec mca_update_stabilized(const cvec& w, const cvec& x, double eta, double beta);
WeightMatrix mca_update_multi(const WeightMatrix& w, const cvec& x, double eta);

/// Applies `rule` once to every neuron. mca_single and mca_stabilized act on
/// each row independently.
WeightMatrix apply_rule(UpdateRule rule, const WeightMatrix& w, const cvec& x,
                        const LearningConfig& config);

/// Seeded complex Gaussian rows normalized to unit norm.
WeightMatrix random_unit_weights(int num_neurons, int dim, std::uint64_t seed);

/// Orthonormal basis each neuron is scored against.
///
/// reference_dim == 0: neuron j targets the j-th minor (MCA rules) or principal
/// (GHA) eigenvector, widened to its eigenspace when that eigenvalue is
/// repeated. reference_dim == k > 0: every neuron targets the span of the k
/// minor or principal eigenvectors.
std::vector<cmat> reference_bases(const EigenDecomposition& oracle, UpdateRule rule,
                                  int num_neurons, int reference_dim = 0);

/// 1 - ||basis^H w / ||w|| ||, clamped to [0, 1]. Equals 1 - |<w_hat, v>| for a
/// single reference vector v.
double direction_error(const cvec& w, const cmat& basis);

struct TrainResult {
  WeightMatrix weights;
  ConvergenceTrace trace;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Presents the snapshot columns in order, epoch after epoch, recording one
/// trace row per presentation. The oracle only feeds trace metrics. Throws
/// DivergenceError when a neuron norm exceeds the cap or goes non-finite.
TrainResult train(const SnapshotMatrix& x, UpdateRule rule, const LearningConfig& config,
                  const EigenDecomposition& oracle, int reference_dim = 0);

}  // namespace sdoa

#endif  // SUBSPACE_DOA_SUBSPACE_LEARNING_HPP
