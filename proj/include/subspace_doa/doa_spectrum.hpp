#ifndef SUBSPACE_DOA_DOA_SPECTRUM_HPP
#define SUBSPACE_DOA_DOA_SPECTRUM_HPP

#include <cstddef>
#include <vector>

#include "subspace_doa/array_signal.hpp"
#include "subspace_doa/eigen_oracle.hpp"
#include "subspace_doa/subspace_learning.hpp"

namespace sdoa {

/// Denominator floor for the pseudo-spectra.
inline constexpr double kSpectrumClamp = 1e-12;

struct AngleGrid {
  double start_deg = 0.0;
  double stop_deg = 180.0;
  double step_deg = 0.5;

  void validate() const;
  /// floor((stop - start) / step) + 1, with a 1e-9 relative slack so that
  /// decimal steps land on the stop angle.
  std::size_t size() const;
  double angle(std::size_t i) const { return start_deg + static_cast<double>(i) * step_deg; }
};

struct SpectrumGrid {
  AngleGrid grid;
  std::vector<double> values;
};

/// Orthonormal columns spanning the estimated noise subspace.
struct NoiseSubspace {
  cmat basis;
};

/// Orthonormal columns spanning the estimated signal subspace.
struct SignalSubspace {
  cmat basis;
};

struct PeakSet {
  std::vector<double> angles_deg;
  std::vector<double> values;

  std::size_t size() const { return angles_deg.size(); }
};

/// Normalizes the columns of `vectors` and runs modified Gram-Schmidt in
/// column order. Throws std::invalid_argument if a column (raw, or after
/// removing the earlier columns) has norm below 1e-10.
cmat orthonormalize_columns(const cmat& vectors);

/// Column k of the basis is row k of `w`, normalized and orthogonalized
/// against the earlier rows. Requires fewer rows than sensors.
NoiseSubspace noise_subspace_from_weights(const WeightMatrix& w);
SignalSubspace signal_subspace_from_weights(const WeightMatrix& w);

/// The m - num_sources smallest / num_sources largest oracle eigenvectors.
NoiseSubspace noise_subspace_from_oracle(const EigenDecomposition& oracle, int num_sources);
SignalSubspace signal_subspace_from_oracle(const EigenDecomposition& oracle, int num_sources);

/// P(theta) = 1 / max(||B^H c(theta)||^2, clamp).
SpectrumGrid mca_spectrum(const ArrayGeometry& geom, const NoiseSubspace& ns,
                          const AngleGrid& grid);

/// P(theta) = 1 / max(c^H (I - B B^H) c, clamp), the complement of the signal
/// subspace. Requires fewer basis columns than sensors.
SpectrumGrid pca_spectrum(const ArrayGeometry& geom, const SignalSubspace& ss,
                          const AngleGrid& grid);

/// Strict interior local maxima; a plateau counts once, at its first index,
/// when both neighbours of the plateau are lower. The k highest (ties to the
/// lower angle) are returned in ascending angle order.
PeakSet find_peaks(const SpectrumGrid& spectrum, std::size_t k);

/// Miss penalty added per unmatched true angle.
inline constexpr double kMissPenaltyDeg = 90.0;

/// Greedy matching: each true angle, in the given order, takes the nearest
/// unused estimate. Throws std::invalid_argument on an empty truth list.
double angle_rmse(const PeakSet& estimated, const std::vector<double>& truth_deg);

}  // namespace sdoa

#endif  // SUBSPACE_DOA_DOA_SPECTRUM_HPP
