#include "subspace_doa/eigen_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace sdoa {

namespace {

using cplx = std::complex<double>;

constexpr int kMaxSweeps = 100;
constexpr double kHermitianTol = 1e-10;
constexpr double kOffDiagonalTol = 1e-14;

double off_diagonal_norm(const cmat& a) {
  double sum = 0.0;
  for (int q = 0; q < a.cols(); ++q) {
    for (int p = 0; p < a.rows(); ++p) {
      if (p != q) sum += std::norm(a(p, q));
    }
  }
  return std::sqrt(sum);
}

void check_hermitian(const cmat& r) {
  if (r.rows() != r.cols() || r.rows() == 0) {
    throw std::invalid_argument("eigendecompose needs a nonempty square matrix");
  }
  if (!r.allFinite()) {
    throw std::invalid_argument("matrix has non-finite entries");
  }
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  const double asym = (r - r.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTol * scale) {
    throw std::invalid_argument("matrix is not Hermitian within tolerance");
  }
}

// Rotates v so its largest-modulus entry is real positive (lowest index wins
// ties).
void canonicalize_phase(Eigen::Ref<cvec> v) {
  int best = 0;
  double best_abs = std::abs(v(0));
  for (int i = 1; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs) {
      best = i;
      best_abs = a;
    }
  }
  if (best_abs == 0.0) return;
  const cplx phase = std::conj(v(best)) / best_abs;
  v *= phase;
  v(best) = cplx(std::abs(v(best)), 0.0);
}

// a <- U^H a U and v <- v U for the complex Givens rotation that zeroes a(p,q).
void rotate(cmat& a, cmat& v, int p, int q) {
  const cplx apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const cplx e = apq / mag;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double tau = (aqq - app) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const cplx se = s * e;
  const cplx se_conj = s * std::conj(e);
  const int m = static_cast<int>(a.rows());

  for (int k = 0; k < m; ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = c * akp - se_conj * akq;
    a(k, q) = se * akp + c * akq;
  }
  for (int k = 0; k < m; ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk - se * aqk;
    a(q, k) = se_conj * apk + c * aqk;
  }
  for (int k = 0; k < m; ++k) {
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = c * vkp - se_conj * vkq;
    v(k, q) = se * vkp + c * vkq;
  }

  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace

EigenDecomposition eigendecompose(const cmat& r) {
  check_hermitian(r);
  const int m = static_cast<int>(r.rows());

  cmat a = 0.5 * (r + r.adjoint());
  cmat v = cmat::Identity(m, m);

  const double scale = a.norm();
  bool converged = m == 1 || scale == 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (int p = 0; p < m - 1; ++p) {
      for (int q = p + 1; q < m; ++q) rotate(a, v, p, q);
    }
    converged = off_diagonal_norm(a) <= kOffDiagonalTol * scale;
  }
  if (!converged) {
    throw ConvergenceError("Jacobi eigensolver exceeded its sweep budget");
  }

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(m);
  out.eigenvectors.resize(m, m);
  for (int k = 0; k < m; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    out.eigenvectors.col(k) = v.col(order[k]).normalized();
    canonicalize_phase(out.eigenvectors.col(k));
  }
  return out;
}

EigenDecomposition eigendecompose(const CovarianceMatrix& r) { return eigendecompose(r.data); }

Eigenpair minor_component(const CovarianceMatrix& r) {
  auto d = eigendecompose(r);
  return {d.eigenvalues.front(), d.eigenvectors.col(0)};
}

Eigenpair principal_component(const CovarianceMatrix& r) {
  auto d = eigendecompose(r);
  const int last = d.dim() - 1;
  return {d.eigenvalues.back(), d.eigenvectors.col(last)};
}

}  // namespace sdoa
