#include "subspace_doa/subspace_learning.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sdoa {

namespace {

using cplx = std::complex<double>;

constexpr double kDegenerateTol = 1e-9;

void require_same_dim(long weights_dim, long x_dim) {
  if (weights_dim != x_dim) {
    throw std::invalid_argument("weight length " + std::to_string(weights_dim) +
                                " does not match input length " + std::to_string(x_dim));
  }
}

// y = w^H x, accumulated in index order.
template <typename W>
cplx neuron_output(const W& w, const cvec& x) {
  cplx y = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) y += std::conj(w(i)) * x(i);
  return y;
}

// w - eta conj(y) (x + competitive). Shared by the single and layered MCA
// rules so that one neuron gives bit-identical results.
template <typename W, typename S>
cvec anti_hebbian_step(const W& w, const cvec& x, cplx y, const S& competitive, double eta) {
  const cplx gain = eta * std::conj(y);
  cvec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = w(i) - gain * (x(i) + competitive(i));
  return out;
}

}  // namespace

std::string_view to_string(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::gha: return "gha";
    case UpdateRule::mca_single: return "mca_single";
    case UpdateRule::mca_stabilized: return "mca_stabilized";
    case UpdateRule::mca_multi: return "mca_multi";
  }
  return "unknown";
}

std::optional<UpdateRule> parse_update_rule(std::string_view name) {
  for (auto rule : {UpdateRule::gha, UpdateRule::mca_single, UpdateRule::mca_stabilized,
                    UpdateRule::mca_multi}) {
    if (to_string(rule) == name) return rule;
  }
  return std::nullopt;
}

void LearningConfig::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("learning rate must lie in (0, 1)");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("beta must be nonnegative");
  }
  if (max_epochs < 0) throw std::invalid_argument("max_epochs must be >= 0");
  if (!(convergence_tol > 0.0)) {
    throw std::invalid_argument("convergence_tol must be positive");
  }
  if (!(divergence_norm_cap > 1.0)) {
    throw std::invalid_argument("divergence_norm_cap must exceed 1");
  }
  if (num_neurons < 1) throw std::invalid_argument("need at least one neuron");
}

WeightMatrix gha_update(const WeightMatrix& w, const cvec& x, double eta) {
  require_same_dim(w.dim(), x.size());
  const int l = w.num_neurons();
  std::vector<cplx> y(l);
  for (int j = 0; j < l; ++j) y[j] = neuron_output(w.rows.row(j), x);

  WeightMatrix out{w.rows};
  cvec deflation = cvec::Zero(x.size());
  for (int j = 0; j < l; ++j) {
    for (Eigen::Index i = 0; i < x.size(); ++i) deflation(i) += w.rows(j, i) * y[j];
    const cplx gain = eta * std::conj(y[j]);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      out.rows(j, i) = w.rows(j, i) + gain * (x(i) - deflation(i));
    }
  }
  return out;
}

cvec mca_update_single(const cvec& w, const cvec& x, double eta) {
  require_same_dim(w.size(), x.size());
  const cplx y = neuron_output(w, x);
  cvec yw(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) yw(i) = w(i) * y;
  return anti_hebbian_step(w, x, y, yw, eta);
}

cvec mca_update_stabilized(const cvec& w, const cvec& x, double eta, double beta) {
  require_same_dim(w.size(), x.size());
  const cplx y = neuron_output(w, x);
  const double y2 = std::norm(y);
  const double penalty = eta * beta * (w.squaredNorm() - 1.0);
  const cplx gain = eta * std::conj(y);
  cvec out(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    out(i) = w(i) - (gain * x(i) - eta * y2 * w(i)) - penalty * w(i);
  }
  return out;
}

WeightMatrix mca_update_multi(const WeightMatrix& w, const cvec& x, double eta) {
  require_same_dim(w.dim(), x.size());
  const int l = w.num_neurons();
  std::vector<cplx> y(l);
  for (int j = 0; j < l; ++j) y[j] = neuron_output(w.rows.row(j), x);

  WeightMatrix out{cmat(l, x.size())};
  cvec competitive(x.size());
  for (int j = 0; j < l; ++j) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const cplx term = w.rows(j, i) * y[j];
      competitive(i) = j == 0 ? term : competitive(i) + term;
    }
    out.rows.row(j) = anti_hebbian_step(w.rows.row(j), x, y[j], competitive, eta).transpose();
  }
  return out;
}

WeightMatrix apply_rule(UpdateRule rule, const WeightMatrix& w, const cvec& x,
                        const LearningConfig& config) {
  switch (rule) {
    case UpdateRule::gha: return gha_update(w, x, config.eta);
    case UpdateRule::mca_multi: return mca_update_multi(w, x, config.eta);
    case UpdateRule::mca_single:
    case UpdateRule::mca_stabilized: {
      WeightMatrix out{cmat(w.rows.rows(), w.rows.cols())};
      for (int j = 0; j < w.num_neurons(); ++j) {
        const cvec row = w.neuron(j);
        out.rows.row(j) = (rule == UpdateRule::mca_single
                               ? mca_update_single(row, x, config.eta)
                               : mca_update_stabilized(row, x, config.eta, config.beta))
                              .transpose();
      }
      return out;
    }
  }
  throw std::logic_error("unhandled update rule");
}

WeightMatrix random_unit_weights(int num_neurons, int dim, std::uint64_t seed) {
  if (num_neurons < 1 || dim < 1) throw std::invalid_argument("empty weight shape");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  WeightMatrix w{cmat(num_neurons, dim)};
  for (int j = 0; j < num_neurons; ++j) {
    double norm = 0.0;
    // w = 0 is a fixed point of every rule; redraw the (measure-zero) case.
    while (!(norm > 1e-12)) {
      for (int i = 0; i < dim; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        w.rows(j, i) = cplx(re, im);
      }
      norm = w.rows.row(j).norm();
    }
    w.rows.row(j) /= norm;
  }
  return w;
}

std::vector<cmat> reference_bases(const EigenDecomposition& oracle, UpdateRule rule,
                                  int num_neurons, int reference_dim) {
  const int m = oracle.dim();
  if (num_neurons < 1 || num_neurons > m) {
    throw std::invalid_argument("neuron count must lie in [1, m]");
  }
  if (reference_dim < 0 || reference_dim > m) {
    throw std::invalid_argument("reference_dim must lie in [0, m]");
  }
  const bool minor = is_minor_rule(rule);

  std::vector<cmat> bases;
  bases.reserve(num_neurons);
  if (reference_dim > 0) {
    const cmat block = minor ? cmat(oracle.eigenvectors.leftCols(reference_dim))
                             : cmat(oracle.eigenvectors.rightCols(reference_dim));
    bases.assign(num_neurons, block);
    return bases;
  }

  double spread = 1.0;
  for (double lambda : oracle.eigenvalues) spread = std::max(spread, std::abs(lambda));
  const double tol = kDegenerateTol * spread;

  for (int j = 0; j < num_neurons; ++j) {
    const int target = minor ? j : m - 1 - j;
    const double lambda = oracle.eigenvalues[target];
    std::vector<int> cluster;
    for (int k = 0; k < m; ++k) {
      if (std::abs(oracle.eigenvalues[k] - lambda) <= tol) cluster.push_back(k);
    }
    cmat basis(m, static_cast<Eigen::Index>(cluster.size()));
    for (std::size_t c = 0; c < cluster.size(); ++c) {
      basis.col(static_cast<Eigen::Index>(c)) = oracle.eigenvectors.col(cluster[c]);
    }
    bases.push_back(std::move(basis));
  }
  return bases;
}

double direction_error(const cvec& w, const cmat& basis) {
  require_same_dim(basis.rows(), w.size());
  const double norm = w.norm();
  if (!(norm > 0.0)) return 1.0;
  const double captured = (basis.adjoint() * w).norm() / norm;
  return std::clamp(1.0 - captured, 0.0, 1.0);
}

TrainResult train(const SnapshotMatrix& x, UpdateRule rule, const LearningConfig& config,
                  const EigenDecomposition& oracle, int reference_dim) {
  config.validate();
  if (x.num_snapshots() < 1 || x.num_sensors() < 1) {
    throw std::invalid_argument("training needs a nonempty snapshot matrix");
  }
  const int m = x.num_sensors();
  if (oracle.dim() != m) {
    throw std::invalid_argument("oracle dimension does not match the snapshots");
  }
  if (config.num_neurons > m) {
    throw std::invalid_argument("more neurons than input dimensions");
  }

  TrainResult result;
  result.weights = random_unit_weights(config.num_neurons, m, config.seed);
  const auto bases = reference_bases(oracle, rule, config.num_neurons, reference_dim);
  const int l = config.num_neurons;

  auto all_below_tol = [&](const TraceRecord& r) {
    return std::all_of(r.direction_error.begin(), r.direction_error.end(),
                       [&](double e) { return e < config.convergence_tol; });
  };

  const int num_snapshots = x.num_snapshots();
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    for (int n = 0; n < num_snapshots; ++n) {
      result.weights = apply_rule(rule, result.weights, x.snapshot(n), config);
      ++result.iterations;

      TraceRecord record;
      record.iteration = result.iterations;
      record.direction_error.resize(l);
      record.norm_dev.resize(l);
      for (int j = 0; j < l; ++j) {
        const cvec wj = result.weights.neuron(j);
        const double norm = wj.norm();
        if (!std::isfinite(norm) || norm > config.divergence_norm_cap) {
          throw DivergenceError("neuron " + std::to_string(j) + " weight norm exceeded " +
                                    std::to_string(config.divergence_norm_cap) +
                                    " at iteration " + std::to_string(result.iterations),
                                result.iterations);
        }
        record.direction_error[j] = direction_error(wj, bases[j]);
        record.norm_dev[j] = std::abs(norm - 1.0);
      }
      result.trace.records.push_back(std::move(record));

      if (all_below_tol(result.trace.records.back())) {
        result.converged = true;
        if (config.stop_on_convergence) return result;
      } else {
        result.converged = false;
      }
    }
  }
  return result;
}

}  // namespace sdoa
