#include "sscosamp/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace sscosamp {

std::string_view to_string(ProjectionMethod m) {
  switch (m) {
    case ProjectionMethod::Threshold: return "threshold";
    case ProjectionMethod::Omp: return "omp";
    case ProjectionMethod::Cosamp: return "cosamp";
    case ProjectionMethod::L1: return "l1";
    case ProjectionMethod::Exhaustive: return "exhaustive";
  }
  return "?";
}

ProjectionMethod parse_projection_method(std::string_view name) {
  for (auto m : {ProjectionMethod::Threshold, ProjectionMethod::Omp, ProjectionMethod::Cosamp,
                 ProjectionMethod::L1, ProjectionMethod::Exhaustive})
    if (to_string(m) == name) return m;
  throw InvalidInput("unknown projection backend '" + std::string(name) + "'");
}

SupportSet top_k(const RealVector& scores, Index k) {
  if (k < 0 || k > scores.size()) throw InvalidInput("top_k: k out of range");
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  auto better = [&](Index a, Index b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), better);
  order.resize(static_cast<std::size_t>(k));
  return SupportSet(std::move(order));
}

std::uint64_t binomial(Index d, Index k) {
  if (k < 0 || k > d) return 0;
  k = std::min(k, d - k);
  unsigned __int128 acc = 1;
  for (Index i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned __int128>(d - k + i) / static_cast<unsigned __int128>(i);
    if (acc > std::numeric_limits<std::uint64_t>::max())
      return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

namespace {

SupportSet threshold_support(const Dictionary& dict, const Vector& z, Index k) {
  const RealVector scores =
      (dict.matrix().adjoint() * z).cwiseAbs().cwiseQuotient(dict.column_norms());
  return top_k(scores, k);
}

SupportSet omp_support(const Dictionary& dict, const Vector& z, Index k) {
  const Matrix& d = dict.matrix();
  const RealVector& norms = dict.column_norms();
  Vector r = z;
  Matrix q(d.rows(), 0);
  std::vector<Index> chosen;
  std::vector<char> taken(static_cast<std::size_t>(d.cols()), 0);

  for (Index step = 0; step < k; ++step) {
    const RealVector scores = (d.adjoint() * r).cwiseAbs().cwiseQuotient(norms);
    Index best = -1;
    for (Index j = 0; j < scores.size(); ++j) {
      if (taken[j]) continue;
      if (best < 0 || scores(j) > scores(best)) best = j;
    }
    taken[best] = 1;
    chosen.push_back(best);

    // Two passes of Gram-Schmidt keep q orthonormal for coherent atoms.
    Vector v = d.col(best);
    for (int pass = 0; pass < 2 && q.cols() > 0; ++pass) v -= q * (q.adjoint() * v);
    const Real vn = v.norm();
    if (vn > 1e-10 * norms(best) && q.cols() < d.rows()) {
      q.conservativeResize(Eigen::NoChange, q.cols() + 1);
      q.col(q.cols() - 1) = v / vn;
      r = z - q * (q.adjoint() * z);
    }
  }
  return SupportSet(std::move(chosen));
}

SupportSet cosamp_support(const ProjectionBackend& b, const Dictionary& dict, const Vector& z,
                          Index k) {
  const Matrix& d = dict.matrix();
  const Real zn = z.norm();
  if (zn == 0) return SupportSet([&] {
      std::vector<Index> v(static_cast<std::size_t>(k));
      std::iota(v.begin(), v.end(), Index{0});
      return v;
    }());
  const Real bound = b.cosamp_norm_bound.value_or(b.cosamp_bound_factor * zn /
                                                  dict.column_norms().minCoeff());

  SupportSet current;
  Vector coeffs;  // values on `current`
  Vector r = z;
  const Index identify = std::min<Index>(2 * k, d.cols());
  for (int it = 0; it < b.cosamp_iters; ++it) {
    const RealVector proxy = (d.adjoint() * r).cwiseAbs();
    const SupportSet merged = set_union(top_k(proxy, identify), current);
    const Matrix dt = dict.columns(merged);
    const Vector bt = ridge_lsq(dt, z, bound).coeffs;

    const SupportSet local = top_k(bt.cwiseAbs(), k);
    std::vector<Index> idx;
    Vector vals(k);
    Index c = 0;
    for (Index i : local) {
      idx.push_back(merged.indices()[static_cast<std::size_t>(i)]);
      vals(c++) = bt(i);
    }
    current = SupportSet(std::move(idx));
    coeffs = std::move(vals);

    const Vector prev_r = r;
    r = z - dict.columns(current) * coeffs;
    if (r.norm() <= 1e-12 * zn || (r - prev_r).norm() <= 1e-12 * zn) break;
  }
  return current;
}

SupportSet l1_support(const ProjectionBackend& b, const Dictionary& dict, const Vector& z,
                      Index k) {
  const BasisPursuitResult bp = basis_pursuit(dict.matrix(), dict.frame_gram_pinv(), z,
                                              b.l1_max_iters, b.l1_tol, b.l1_sigma_rel);
  return top_k(bp.coeffs.cwiseAbs(), k);
}

}  // namespace

void validate(const ProjectionBackend& b) {
  if (b.cosamp_iters < 1) throw InvalidInput("backend: cosamp_iters must be positive");
  if (b.cosamp_norm_bound && !(*b.cosamp_norm_bound > 0))
    throw InvalidInput("backend: cosamp_norm_bound must be positive");
  if (!(b.cosamp_bound_factor > 0)) throw InvalidInput("backend: cosamp_bound_factor must be positive");
  if (b.l1_max_iters < 1) throw InvalidInput("backend: l1_max_iters must be positive");
  if (!(b.l1_tol > 0) || !(b.l1_sigma_rel >= 0))
    throw InvalidInput("backend: l1 tolerances must be positive");
  if (b.enumeration_cap < 1) throw InvalidInput("backend: enumeration_cap must be positive");
}

SupportSet project_support(const ProjectionBackend& backend, const Dictionary& dict,
                           const Vector& z, Index k) {
  if (k < 1 || k > dict.d()) throw InvalidInput("project_support: need 1 <= k <= d");
  if (z.size() != dict.n()) throw InvalidInput("project_support: z length != n");
  validate(backend);
  switch (backend.method) {
    case ProjectionMethod::Threshold: return threshold_support(dict, z, k);
    case ProjectionMethod::Omp: return omp_support(dict, z, k);
    case ProjectionMethod::Cosamp: return cosamp_support(backend, dict, z, k);
    case ProjectionMethod::L1: return l1_support(backend, dict, z, k);
    case ProjectionMethod::Exhaustive:
      return optimal_projection(dict, z, k, backend.enumeration_cap).support;
  }
  throw InvalidInput("project_support: unknown backend");
}

OptimalProjection optimal_projection(const Dictionary& dict, const Vector& z, Index k,
                                     std::uint64_t cap) {
  if (k < 1 || k > dict.d()) throw InvalidInput("optimal_projection: need 1 <= k <= d");
  if (z.size() != dict.n()) throw InvalidInput("optimal_projection: z length != n");
  const std::uint64_t count = binomial(dict.d(), k);
  if (count > cap) {
    std::ostringstream os;
    os << "optimal_projection: C(" << dict.d() << ',' << k << ") = " << count
       << " exceeds cap " << cap;
    throw InstanceTooLarge(os.str());
  }

  const Real tie = 1e-14 * z.norm();
  OptimalProjection best;
  best.residual = std::numeric_limits<Real>::infinity();
  for_each_combination(dict.d(), k, [&](const std::vector<Index>& c) {
    SupportSet s(c);
    const auto p = build_projector(dict.matrix(), s);
    Vector pz = p.apply(z);
    const Real res = (z - pz).norm();
    if (res < best.residual - tie) {
      best.residual = res;
      best.support = std::move(s);
      best.projection = std::move(pz);
    }
  });
  return best;
}

ProjectionQuality evaluate_projection_quality(const Dictionary& dict, const Vector& z, Index k,
                                              const ProjectionBackend& backend) {
  const OptimalProjection opt = optimal_projection(dict, z, k, backend.enumeration_cap);
  const SupportSet est = project_support(backend, dict, z, k);
  const Vector pest = build_projector(dict.matrix(), est).apply(z);

  ProjectionQuality q;
  q.opt_residual = opt.residual;
  q.opt_norm = opt.projection.norm();
  q.gap = (opt.projection - pest).norm();

  const Real floor = 1e-12 * z.norm();
  auto ratio = [&](Real denom, bool& inf) {
    if (q.gap <= floor) return Real{0};
    if (denom < floor) {
      inf = true;
      return std::numeric_limits<Real>::infinity();
    }
    return q.gap / denom;
  };
  q.eps1 = ratio(q.opt_norm, q.eps1_infinite);
  q.eps2 = ratio(q.opt_residual, q.eps2_infinite);
  return q;
}

BasisPursuitResult basis_pursuit(const Matrix& m, const Matrix& gram_pinv, const Vector& z,
                                 int max_iters, Real tol, Real sigma_rel) {
  if (z.size() != m.rows()) throw InvalidInput("basis_pursuit: dimension mismatch");
  if (max_iters < 1 || !(tol > 0) || !(sigma_rel >= 0))
    throw InvalidInput("basis_pursuit: bad solver parameters");
  const Index d = m.cols();
  BasisPursuitResult out;
  out.coeffs = Vector::Zero(d);
  const Real zn = z.norm();
  if (zn == 0) return out;

  // Work on the unit-norm problem; the solution scales linearly.
  const Vector zs = z / zn;
  auto project_affine = [&](const Vector& v) -> Vector {
    return v - m.adjoint() * (gram_pinv * (m * v - zs));
  };
  auto shrink = [](const Vector& v, Real t) {
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
      const Real a = std::abs(v(i));
      out(i) = a > t ? v(i) * ((a - t) / a) : Complex(0);
    }
    return out;
  };

  constexpr int kRhoAdaptIters = 500;
  Vector alpha = Vector::Zero(d), beta = Vector::Zero(d), u = Vector::Zero(d);
  Real rho = 1;
  const Real abs_tol = tol * std::sqrt(static_cast<Real>(d));
  for (int it = 1; it <= max_iters; ++it) {
    alpha = project_affine(beta - u);
    const Vector beta_prev = beta;
    beta = shrink(alpha + u, 1 / rho);
    u += alpha - beta;

    const Real r = (alpha - beta).norm();
    const Real s = rho * (beta - beta_prev).norm();
    out.iterations = it;
    out.primal_residual = r;
    out.dual_residual = s;
    const bool dual_ok = s <= abs_tol + tol * rho * u.norm();
    if ((r <= abs_tol + tol * std::max(alpha.norm(), beta.norm()) && dual_ok) ||
        (dual_ok && (zs - m * beta).norm() <= sigma_rel)) {
      out.coeffs = beta * zn;
      out.fit_residual = (z - m * out.coeffs).norm();
      return out;
    }
    // Residual balancing during warm-up only; a fixed rho guarantees convergence.
    if (it % 10 == 0 && it <= kRhoAdaptIters) {
      if (r > 10 * s) {
        rho *= 2;
        u /= 2;
      } else if (s > 10 * r) {
        rho /= 2;
        u *= 2;
      }
    }
    if (!beta.allFinite()) break;
  }
  std::ostringstream os;
  os << "basis_pursuit: no convergence after " << out.iterations
     << " iterations (primal " << out.primal_residual << ", dual " << out.dual_residual << ")";
  throw NumericalFailure(os.str());
}

}  // namespace sscosamp
