#ifndef SUBSPACE_DOA_ARRAY_SIGNAL_HPP
#define SUBSPACE_DOA_ARRAY_SIGNAL_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace sdoa {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

/// Axis against which a direction of arrival is measured.
///
/// `broadside`: the inter-sensor phase is 2*pi*spacing*sin(theta), so 0 deg is
/// broadside and 90 deg endfire. Angles theta and 180-theta share a steering
/// vector.
/// `axis`: the phase is 2*pi*spacing*cos(theta), so 0/180 deg are endfire and
/// 90 deg broadside; every angle in [0, 180] is distinct.
enum class AngleReference { broadside, axis };

struct ArrayGeometry {
  int num_sensors = 8;
  double spacing_wavelengths = 0.5;
  AngleReference reference = AngleReference::broadside;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct SourceSpec {
  double doa_deg = 90.0;
  double normalized_freq = 0.25;
  double amplitude = 1.0;

  void validate() const;
};

/// Circular complex white Gaussian noise; `sigma` applies to the real and the
/// imaginary part independently.
struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Array output, sensors x snapshots.
struct SnapshotMatrix {
  cmat data;

  int num_sensors() const { return static_cast<int>(data.rows()); }
  int num_snapshots() const { return static_cast<int>(data.cols()); }
  cvec snapshot(int n) const { return data.col(n); }
};

/// Hermitian positive semidefinite m x m matrix.
struct CovarianceMatrix {
  cmat data;

  int dim() const { return static_cast<int>(data.rows()); }
};

/// Unit-modulus array response to a plane wave; element 0 is 1+0j.
/// Throws std::domain_error when doa_deg is outside [0, 180].
cvec steering_vector(const ArrayGeometry& geom, double doa_deg);

/// Column n is sum_i a_i cos(2 pi f_i n) c(theta_i) plus noise. Noise is drawn
/// column by column (sensor order, real part then imaginary part), so a shorter
/// run with the same seed is a prefix of a longer one.
SnapshotMatrix synthesize_snapshots(const ArrayGeometry& geom,
                                    const std::vector<SourceSpec>& sources,
                                    int num_snapshots, const NoiseSpec& noise);

/// (1/L) sum_n x(n) x(n)^H.
CovarianceMatrix sample_covariance(const SnapshotMatrix& x);

}  // namespace sdoa

#endif  // SUBSPACE_DOA_ARRAY_SIGNAL_HPP
