#include "subspace_doa/array_signal.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace sdoa {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double deg) { return deg * kPi / 180.0; }

}  // namespace

void ArrayGeometry::validate() const {
  if (num_sensors < 2) {
    throw std::invalid_argument("array needs at least 2 sensors, got " +
                                std::to_string(num_sensors));
  }
  if (!(spacing_wavelengths > 0.0) || !std::isfinite(spacing_wavelengths)) {
    throw std::invalid_argument("sensor spacing must be positive");
  }
}

void SourceSpec::validate() const {
  if (!(doa_deg >= 0.0 && doa_deg <= 180.0)) {
    throw std::invalid_argument("source DOA must lie in [0, 180] degrees");
  }
  if (!(normalized_freq > 0.0 && normalized_freq <= 0.5)) {
    throw std::invalid_argument("normalized frequency must lie in (0, 0.5]");
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("source amplitude must be positive");
  }
}

void NoiseSpec::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("noise sigma must be nonnegative");
  }
}

cvec steering_vector(const ArrayGeometry& geom, double doa_deg) {
  geom.validate();
  if (!(doa_deg >= 0.0 && doa_deg <= 180.0)) {
    throw std::domain_error("DOA " + std::to_string(doa_deg) +
                            " deg outside [0, 180]");
  }
  const double theta = deg2rad(doa_deg);
  const double direction =
      geom.reference == AngleReference::broadside ? std::sin(theta) : std::cos(theta);
  const double phase_step = -2.0 * kPi * geom.spacing_wavelengths * direction;

  cvec c(geom.num_sensors);
  for (int i = 0; i < geom.num_sensors; ++i) {
    c(i) = std::polar(1.0, phase_step * i);
  }
  return c;
}

SnapshotMatrix synthesize_snapshots(const ArrayGeometry& geom,
                                    const std::vector<SourceSpec>& sources,
                                    int num_snapshots, const NoiseSpec& noise) {
  geom.validate();
  noise.validate();
  if (sources.empty()) {
    throw std::invalid_argument("at least one source is required");
  }
  if (static_cast<int>(sources.size()) >= geom.num_sensors) {
    throw std::invalid_argument("source count must be smaller than sensor count");
  }
  if (num_snapshots < 1) {
    throw std::invalid_argument("need at least one snapshot");
  }

  std::vector<cvec> steering;
  steering.reserve(sources.size());
  for (const auto& s : sources) {
    s.validate();
    steering.push_back(steering_vector(geom, s.doa_deg));
  }

  const int m = geom.num_sensors;
  SnapshotMatrix out{cmat::Zero(m, num_snapshots)};
  for (int n = 0; n < num_snapshots; ++n) {
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const double envelope = sources[i].amplitude *
                              std::cos(2.0 * kPi * sources[i].normalized_freq * n);
      out.data.col(n) += envelope * steering[i];
    }
  }

  if (noise.sigma > 0.0) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> normal(0.0, noise.sigma);
    for (int n = 0; n < num_snapshots; ++n) {
      for (int i = 0; i < m; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        out.data(i, n) += std::complex<double>(re, im);
      }
    }
  }
  return out;
}

CovarianceMatrix sample_covariance(const SnapshotMatrix& x) {
  if (x.num_snapshots() < 1 || x.num_sensors() < 1) {
    throw std::invalid_argument("empty snapshot matrix");
  }
  cmat r = x.data * x.data.adjoint() / static_cast<double>(x.num_snapshots());
  // Exact Hermitian symmetry and a real diagonal.
  r = 0.5 * (r + r.adjoint()).eval();
  for (int i = 0; i < r.rows(); ++i) r(i, i) = r(i, i).real();
  return CovarianceMatrix{std::move(r)};
}

}  // namespace sdoa
