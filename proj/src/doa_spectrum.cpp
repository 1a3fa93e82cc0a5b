#include "subspace_doa/doa_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sdoa {

namespace {

constexpr double kRankTol = 1e-10;

cmat weights_as_columns(const WeightMatrix& w) {
  if (w.num_neurons() < 1) throw std::invalid_argument("no weight rows");
  if (w.num_neurons() >= w.dim()) {
    throw std::invalid_argument("subspace needs fewer rows than sensors");
  }
  return w.rows.transpose();
}

void require_rows(const cmat& basis, const ArrayGeometry& geom) {
  geom.validate();
  if (basis.rows() != geom.num_sensors) {
    throw std::invalid_argument("subspace basis has " + std::to_string(basis.rows()) +
                                " rows for a " + std::to_string(geom.num_sensors) +
                                "-sensor array");
  }
}

}  // namespace

void AngleGrid::validate() const {
  if (!std::isfinite(start_deg) || !std::isfinite(stop_deg) || !(start_deg < stop_deg)) {
    throw std::invalid_argument("angle grid needs start < stop");
  }
  if (!(step_deg > 0.0)) throw std::invalid_argument("angle grid step must be positive");
  if (start_deg < 0.0 || stop_deg > 180.0) {
    throw std::invalid_argument("angle grid must lie within [0, 180]");
  }
}

std::size_t AngleGrid::size() const {
  const double span = (stop_deg - start_deg) / step_deg;
  return static_cast<std::size_t>(std::floor(span * (1.0 + 1e-9))) + 1;
}

cmat orthonormalize_columns(const cmat& vectors) {
  cmat q = vectors;
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const double raw = q.col(k).norm();
    if (!(raw >= kRankTol)) {
      throw std::invalid_argument("rank-deficient subspace: column " + std::to_string(k) +
                                  " has negligible norm");
    }
    q.col(k) /= raw;
    for (Eigen::Index p = 0; p < k; ++p) {
      const std::complex<double> proj = q.col(p).dot(q.col(k));
      q.col(k) -= proj * q.col(p);
    }
    const double residual = q.col(k).norm();
    if (!(residual >= kRankTol)) {
      throw std::invalid_argument("rank-deficient subspace: column " + std::to_string(k) +
                                  " is dependent on earlier columns");
    }
    q.col(k) /= residual;
  }
  return q;
}

NoiseSubspace noise_subspace_from_weights(const WeightMatrix& w) {
  return {orthonormalize_columns(weights_as_columns(w))};
}

SignalSubspace signal_subspace_from_weights(const WeightMatrix& w) {
  return {orthonormalize_columns(weights_as_columns(w))};
}

NoiseSubspace noise_subspace_from_oracle(const EigenDecomposition& oracle, int num_sources) {
  const int m = oracle.dim();
  if (num_sources < 1 || num_sources >= m) {
    throw std::invalid_argument("source count must lie in [1, m)");
  }
  return {oracle.eigenvectors.leftCols(m - num_sources)};
}

SignalSubspace signal_subspace_from_oracle(const EigenDecomposition& oracle, int num_sources) {
  const int m = oracle.dim();
  if (num_sources < 1 || num_sources >= m) {
    throw std::invalid_argument("source count must lie in [1, m)");
  }
  return {oracle.eigenvectors.rightCols(num_sources)};
}

SpectrumGrid mca_spectrum(const ArrayGeometry& geom, const NoiseSubspace& ns,
                          const AngleGrid& grid) {
  require_rows(ns.basis, geom);
  grid.validate();
  SpectrumGrid out{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const cvec c = steering_vector(geom, std::min(grid.angle(i), 180.0));
    const double denom = (ns.basis.adjoint() * c).squaredNorm();
    out.values[i] = 1.0 / std::max(denom, kSpectrumClamp);
  }
  return out;
}

SpectrumGrid pca_spectrum(const ArrayGeometry& geom, const SignalSubspace& ss,
                          const AngleGrid& grid) {
  require_rows(ss.basis, geom);
  if (ss.basis.cols() < 1 || ss.basis.cols() >= ss.basis.rows()) {
    throw std::invalid_argument("signal subspace needs between 1 and m-1 columns");
  }
  grid.validate();
  SpectrumGrid out{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const cvec c = steering_vector(geom, std::min(grid.angle(i), 180.0));
    const cvec residual = c - ss.basis * (ss.basis.adjoint() * c);
    out.values[i] = 1.0 / std::max(residual.squaredNorm(), kSpectrumClamp);
  }
  return out;
}

PeakSet find_peaks(const SpectrumGrid& spectrum, std::size_t k) {
  if (k < 1) throw std::invalid_argument("find_peaks needs k >= 1");
  const auto& v = spectrum.values;
  const std::size_t n = v.size();

  std::vector<std::size_t> candidates;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(v[i] > v[i - 1])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end + 1 < n && v[end + 1] == v[i]) ++end;
    if (end + 1 < n && v[end + 1] < v[i]) candidates.push_back(i);
    i = end + 1;
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  if (candidates.size() > k) candidates.resize(k);
  std::sort(candidates.begin(), candidates.end());

  PeakSet peaks;
  for (std::size_t idx : candidates) {
    peaks.angles_deg.push_back(spectrum.grid.angle(idx));
    peaks.values.push_back(v[idx]);
  }
  return peaks;
}

double angle_rmse(const PeakSet& estimated, const std::vector<double>& truth_deg) {
  if (truth_deg.empty()) throw std::invalid_argument("angle_rmse needs true angles");
  std::vector<bool> used(estimated.size(), false);
  double sum_sq = 0.0;
  for (double truth : truth_deg) {
    std::size_t best = estimated.size();
    double best_dist = 0.0;
    for (std::size_t e = 0; e < estimated.size(); ++e) {
      if (used[e]) continue;
      const double dist = std::abs(estimated.angles_deg[e] - truth);
      if (best == estimated.size() || dist < best_dist) {
        best = e;
        best_dist = dist;
      }
    }
    if (best == estimated.size()) {
      sum_sq += kMissPenaltyDeg * kMissPenaltyDeg;
    } else {
      used[best] = true;
      sum_sq += best_dist * best_dist;
    }
  }
  return std::sqrt(sum_sq / static_cast<double>(truth_deg.size()));
}

}  // namespace sdoa
