#pragma once

// Dense linear-algebra primitives shared by every recovery routine:
// orthogonal projectors onto column spans, norm-constrained (Tikhonov)
// least squares, and a power-iteration operator norm. All functions are
// templated on the scalar type so real oracles can reuse them in tests.

#include "sscosamp/types.hpp"

#include <Eigen/QR>

#include <cmath>
#include <random>

namespace sscosamp {

inline constexpr Real kDefaultRankTol = 1e-10;

/// Orthogonal projector P = Q Q^H onto the span of a set of columns.
template <typename Scalar>
class OrthoProjector {
 public:
  OrthoProjector() = default;
  OrthoProjector(MatrixX<Scalar> basis, SupportSet source)
      : basis_(std::move(basis)), source_(std::move(source)) {}

  const MatrixX<Scalar>& basis() const { return basis_; }
  const SupportSet& source_support() const { return source_; }
  Index rank() const { return basis_.cols(); }
  Index dim() const { return basis_.rows(); }

  /// P z.
  template <typename Derived>
  VectorX<Scalar> apply(const Eigen::MatrixBase<Derived>& z) const {
    if (z.size() != basis_.rows())
      throw InvalidInput("OrthoProjector::apply: dimension mismatch");
    if (basis_.cols() == 0) return VectorX<Scalar>::Zero(z.size());
    return basis_ * (basis_.adjoint() * z);
  }

  /// z - P z.
  template <typename Derived>
  VectorX<Scalar> complement(const Eigen::MatrixBase<Derived>& z) const {
    return z - apply(z);
  }

 private:
  MatrixX<Scalar> basis_;
  SupportSet source_;
};

/// Orthonormal basis for the column span of `cols` via column-pivoted
/// Householder QR. Pivots at or below `rank_tol` times the largest pivot
/// are treated as zero.
template <typename Derived>
OrthoProjector<typename Derived::Scalar> build_projector(
    const Eigen::MatrixBase<Derived>& cols, Real rank_tol = kDefaultRankTol,
    SupportSet source = {}) {
  using Scalar = typename Derived::Scalar;
  if (cols.cols() == 0 || cols.rows() == 0)
    throw InvalidInput("build_projector: empty column set");
  if (!(rank_tol >= 0)) throw InvalidInput("build_projector: negative rank_tol");

  Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(cols.rows(), cols.cols());
  qr.setThreshold(rank_tol);
  qr.compute(cols);
  const Index r = qr.rank();
  MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(cols.rows(), r);
  return OrthoProjector<Scalar>(std::move(q), std::move(source));
}

/// Projector onto span{ D_j : j in s }.
template <typename Derived>
OrthoProjector<typename Derived::Scalar> build_projector(
    const Eigen::MatrixBase<Derived>& dict, const SupportSet& s,
    Real rank_tol = kDefaultRankTol) {
  if (s.empty()) throw InvalidInput("build_projector: empty support");
  if (s.max_index() >= dict.cols())
    throw InvalidInput("build_projector: support index out of range");
  return build_projector(select_columns(dict, s), rank_tol, s);
}

template <typename Scalar>
struct RidgeSolution {
  VectorX<Scalar> coeffs;
  Real ridge = 0;     // 0 when the unconstrained solution was feasible
  int iterations = 0; // bisection steps
};

inline constexpr int kTikhonovMaxIters = 2000;

/// Minimizes ||y - M b|| subject to ||b|| <= norm_bound.
///
/// A column-pivoted QR least-squares fit is accepted when it already meets
/// the bound. Otherwise the ridge-regularized normal equations
/// (M^H M + lambda I) b = M^H y are solved through the thin SVD of M, with
/// lambda found by bisection so that
/// norm_bound (1 - tol) <= ||b(lambda)|| <= norm_bound.
RidgeSolution<Complex> ridge_lsq(const Matrix& m, const Vector& y, Real norm_bound,
                                 Real tol = 1e-6);
RidgeSolution<Real> ridge_lsq(const RealMatrix& m, const RealVector& y, Real norm_bound,
                              Real tol = 1e-6);

/// Minimizes ||y - A D_T b|| subject to ||b|| <= norm_bound; see ridge_lsq.
/// The synthesized signal is D_T b.
template <typename DA, typename DT, typename DY>
RidgeSolution<typename DT::Scalar> tikhonov_lsq(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DT>& dict_cols,
    const Eigen::MatrixBase<DY>& y, Real norm_bound, Real tol = 1e-6) {
  using Scalar = typename DT::Scalar;
  if (a.rows() < 1) throw InvalidInput("tikhonov_lsq: A has no rows");
  if (dict_cols.cols() < 1) throw InvalidInput("tikhonov_lsq: empty support");
  if (a.cols() != dict_cols.rows() || y.size() != a.rows())
    throw InvalidInput("tikhonov_lsq: dimension mismatch");
  const MatrixX<Scalar> m = a.template cast<Scalar>() * dict_cols;
  return ridge_lsq(m, VectorX<Scalar>(y.template cast<Scalar>()), norm_bound, tol);
}

/// Largest singular value by power iteration on M^H M from a fixed
/// pseudo-random start. Every iterate gives a lower bound; the running
/// maximum is returned, so the estimate is non-decreasing in `iters`.
template <typename Derived>
Real operator_norm(const Eigen::MatrixBase<Derived>& m, int iters = 1000) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0 || m.cols() == 0) throw InvalidInput("operator_norm: empty matrix");
  if (iters < 10) throw InvalidInput("operator_norm: iters must be >= 10");

  std::mt19937_64 gen(0x5eed5eedULL);
  std::normal_distribution<Real> normal;
  VectorX<Scalar> v(m.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = Scalar(normal(gen));
  v.normalize();

  Real best = 0;
  for (int it = 0; it < iters; ++it) {
    const VectorX<Scalar> w = m * v;
    best = std::max(best, w.norm());
    VectorX<Scalar> next = m.adjoint() * w;
    const Real nn = next.norm();
    if (nn == 0) break;
    v = next / nn;
  }
  return best;
}

}  // namespace sscosamp
