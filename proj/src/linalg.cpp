#include "sscosamp/linalg.hpp"

#include <Eigen/SVD>

namespace sscosamp {

namespace {

template <typename Scalar>
RidgeSolution<Scalar> ridge_impl(const MatrixX<Scalar>& m, const VectorX<Scalar>& y,
                                 Real norm_bound, Real tol) {
  if (m.rows() < 1) throw InvalidInput("tikhonov_lsq: A has no rows");
  if (m.cols() < 1) throw InvalidInput("tikhonov_lsq: empty support");
  if (y.size() != m.rows()) throw InvalidInput("tikhonov_lsq: dimension mismatch");
  if (!(norm_bound > 0) || !(tol > 0))
    throw InvalidInput("tikhonov_lsq: norm_bound and tol must be positive");

  RidgeSolution<Scalar> out;
  if (m.rows() >= m.cols()) {
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(m);
    if (qr.rank() == m.cols()) {
      out.coeffs = qr.solve(y);
      if (out.coeffs.allFinite() && out.coeffs.norm() <= norm_bound) return out;
    }
  }

  Eigen::BDCSVD<MatrixX<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const VectorX<Scalar> c = svd.matrixU().adjoint() * y;
  const Real s_floor = s.size() ? 1e-12 * s(0) : 0;

  auto solve = [&](Real lambda) {
    VectorX<Scalar> w = VectorX<Scalar>::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i) {
      if (lambda == 0 && s(i) <= s_floor) continue;
      w(i) = c(i) * (s(i) / (s(i) * s(i) + lambda));
    }
    return VectorX<Scalar>(svd.matrixV() * w);
  };

  out.coeffs = solve(0);
  if (!out.coeffs.allFinite()) throw NumericalFailure("tikhonov_lsq: non-finite solution");
  if (out.coeffs.norm() <= norm_bound) return out;

  // ||b(lambda)|| <= ||M^H y|| / lambda bounds the bracket from above.
  Real lo = 0;
  Real hi = (s.cast<Scalar>().asDiagonal() * c).norm() / norm_bound;
  VectorX<Scalar> best = solve(hi);
  for (int it = 1; it <= kTikhonovMaxIters; ++it) {
    if (best.norm() >= norm_bound * (1 - tol)) {
      out.coeffs = std::move(best);
      out.ridge = hi;
      out.iterations = it - 1;
      return out;
    }
    const Real mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    VectorX<Scalar> b = solve(mid);
    if (b.norm() > norm_bound) {
      lo = mid;
    } else {
      hi = mid;
      best = std::move(b);
    }
  }
  throw NumericalFailure("tikhonov_lsq: ridge bisection did not converge");
}

}  // namespace

RidgeSolution<Complex> ridge_lsq(const Matrix& m, const Vector& y, Real norm_bound, Real tol) {
  return ridge_impl(m, y, norm_bound, tol);
}

RidgeSolution<Real> ridge_lsq(const RealMatrix& m, const RealVector& y, Real norm_bound,
                              Real tol) {
  return ridge_impl(m, y, norm_bound, tol);
}

}  // namespace sscosamp
