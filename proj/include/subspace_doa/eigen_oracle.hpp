#ifndef SUBSPACE_DOA_EIGEN_ORACLE_HPP
#define SUBSPACE_DOA_EIGEN_ORACLE_HPP

#include <stdexcept>
#include <vector>

#include "subspace_doa/array_signal.hpp"

namespace sdoa {

/// Thrown when the Jacobi sweeps do not reduce the off-diagonal mass within
/// the sweep budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenpairs in ascending eigenvalue order; column k of `eigenvectors` pairs
/// with `eigenvalues[k]`. Each column is unit norm with its largest-modulus
/// entry real and positive (lowest index on ties).
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  cmat eigenvectors;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

struct Eigenpair {
  double eigenvalue = 0.0;
  cvec eigenvector;
};

/// Cyclic complex Jacobi. Throws std::invalid_argument when `r` is not square
/// or not Hermitian within 1e-10 (scaled by max(1, max |r_ij|)), and
/// ConvergenceError when the sweep budget runs out.
EigenDecomposition eigendecompose(const cmat& r);
EigenDecomposition eigendecompose(const CovarianceMatrix& r);

Eigenpair minor_component(const CovarianceMatrix& r);
Eigenpair principal_component(const CovarianceMatrix& r);

}  // namespace sdoa

#endif  // SUBSPACE_DOA_EIGEN_ORACLE_HPP
