#include "sscosamp/recovery.hpp"

#include <ostream>
#include <sstream>

namespace sscosamp {

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::ResidualTol: return "residual";
    case StopReason::Stall: return "stall";
    case StopReason::MaxIters: return "max_iters";
  }
  return "?";
}

namespace {

void check_dims(const SensingMatrix& a, const Dictionary& dict, const Measurements& y) {
  if (a.n() != dict.n()) throw InvalidInput("recovery: A columns != dictionary rows");
  if (y.y.size() != a.m()) throw InvalidInput("recovery: y length != m");
}

// Rethrows backend failures annotated with the iteration they occurred in.
template <typename Fn>
auto at_iteration(int iter, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalFailure& e) {
    throw NumericalFailure("iteration " + std::to_string(iter + 1) + ": " + e.what());
  } catch (const InstanceTooLarge& e) {
    throw InstanceTooLarge("iteration " + std::to_string(iter + 1) + ": " + e.what());
  }
}

// Shared stopping rule; returns true when the loop should end.
bool should_stop(const Vector& x_new, const Vector& x_old, Real r_norm, Real y_norm,
                 Real residual_tol, Real stall_tol, StopReason& reason) {
  if (r_norm <= residual_tol * y_norm) {
    reason = StopReason::ResidualTol;
    return true;
  }
  if ((x_new - x_old).norm() <= stall_tol * x_old.norm()) {
    reason = StopReason::Stall;
    return true;
  }
  return false;
}

void require_finite(const Vector& v, int iter) {
  if (!v.allFinite())
    throw NumericalFailure("iteration " + std::to_string(iter + 1) + ": non-finite iterate");
}

}  // namespace

RecoveryTrace sscosamp(const SensingMatrix& a, const Dictionary& dict, const Measurements& meas,
                       const SSCoSaMPConfig& cfg) {
  check_dims(a, dict, meas);
  if (cfg.k < 1 || 2 * cfg.k > dict.d()) throw InvalidInput("sscosamp: need 1 <= 2k <= d");
  if (cfg.max_iters < 1) throw InvalidInput("sscosamp: max_iters must be >= 1");
  if (!(cfg.residual_tol >= 0) || !(cfg.stall_tol >= 0))
    throw InvalidInput("sscosamp: tolerances must be >= 0");

  const Vector& y = meas.y;
  const Real y_norm = y.norm();
  RecoveryTrace trace;
  Vector x = Vector::Zero(dict.n());
  Vector r = y;
  SupportSet gamma;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    IterationRecord rec;
    const Vector h = a.matrix.transpose() * r;
    rec.proxy_norm = h.norm();
    rec.identified =
        at_iteration(iter, [&] { return project_support(cfg.identify_backend, dict, h, 2 * cfg.k); });
    rec.merged = set_union(rec.identified, gamma);

    const Matrix dt = dict.columns(rec.merged);
    const Vector b = at_iteration(iter, [&] {
      return tikhonov_lsq(a.matrix, dt, y, cfg.tikhonov_norm_bound, cfg.tikhonov_tol).coeffs;
    });
    rec.intermediate = dt * b;
    require_finite(rec.intermediate, iter);

    gamma = at_iteration(
        iter, [&] { return project_support(cfg.prune_backend, dict, rec.intermediate, cfg.k); });
    rec.pruned = gamma;
    rec.estimate = build_projector(dict.matrix(), gamma).apply(rec.intermediate);
    require_finite(rec.estimate, iter);
    r = y - a.matrix * rec.estimate;
    rec.residual_norm = r.norm();

    const bool stop = should_stop(rec.estimate, x, rec.residual_norm, y_norm, cfg.residual_tol,
                                  cfg.stall_tol, trace.stop_reason);
    x = rec.estimate;
    trace.iterations.push_back(std::move(rec));
    if (stop) break;
  }
  trace.estimate = x;
  return trace;
}

RecoveryTrace cosamp_baseline(const SensingMatrix& a, const Dictionary& dict,
                              const Measurements& meas, Index k, const BaselineOptions& opt) {
  check_dims(a, dict, meas);
  if (k < 1 || 2 * k > dict.d()) throw InvalidInput("cosamp_baseline: need 1 <= 2k <= d");
  const Matrix ad = a.matrix * dict.matrix();
  const Vector& y = meas.y;
  const Real y_norm = y.norm();

  RecoveryTrace trace;
  Vector x = Vector::Zero(dict.n());
  Vector r = y;
  SupportSet current;
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    IterationRecord rec;
    const Vector proxy = ad.adjoint() * r;
    rec.proxy_norm = proxy.norm();
    rec.identified = top_k(proxy.cwiseAbs(), 2 * k);
    rec.merged = set_union(rec.identified, current);

    const Vector b = at_iteration(iter, [&] {
      return ridge_lsq(select_columns(ad, rec.merged), y, opt.norm_bound, 1e-6).coeffs;
    });
    rec.intermediate = dict.columns(rec.merged) * b;
    require_finite(rec.intermediate, iter);

    const SupportSet local = top_k(b.cwiseAbs(), k);
    std::vector<Index> idx;
    Vector vals(k);
    Index c = 0;
    for (Index i : local) {
      idx.push_back(rec.merged.indices()[static_cast<std::size_t>(i)]);
      vals(c++) = b(i);
    }
    current = SupportSet(std::move(idx));
    rec.pruned = current;
    rec.estimate = dict.columns(current) * vals;
    require_finite(rec.estimate, iter);
    r = y - a.matrix * rec.estimate;
    rec.residual_norm = r.norm();

    const bool stop = should_stop(rec.estimate, x, rec.residual_norm, y_norm, opt.residual_tol,
                                  opt.stall_tol, trace.stop_reason);
    x = rec.estimate;
    trace.iterations.push_back(std::move(rec));
    if (stop) break;
  }
  trace.estimate = x;
  return trace;
}

RecoveryTrace omp_baseline(const SensingMatrix& a, const Dictionary& dict,
                           const Measurements& meas, Index k, const BaselineOptions& opt) {
  check_dims(a, dict, meas);
  if (k < 1 || k > dict.d()) throw InvalidInput("omp_baseline: need 1 <= k <= d");
  const Matrix ad = a.matrix * dict.matrix();
  RealVector norms = ad.colwise().norm().transpose();
  if (!opt.normalize_columns) norms.setOnes();
  for (Index j = 0; j < norms.size(); ++j)
    if (norms(j) == 0) norms(j) = std::numeric_limits<Real>::infinity();

  const Vector& y = meas.y;
  const Real y_norm = y.norm();
  RecoveryTrace trace;
  trace.estimate = Vector::Zero(dict.n());
  Vector r = y;
  std::vector<Index> chosen;
  std::vector<char> taken(static_cast<std::size_t>(dict.d()), 0);
  for (Index step = 0; step < k; ++step) {
    IterationRecord rec;
    const Vector proxy = ad.adjoint() * r;
    rec.proxy_norm = proxy.norm();
    const RealVector scores = proxy.cwiseAbs().cwiseQuotient(norms);
    Index best = -1;
    for (Index j = 0; j < scores.size(); ++j)
      if (!taken[j] && (best < 0 || scores(j) > scores(best))) best = j;
    taken[best] = 1;
    chosen.push_back(best);
    rec.identified = SupportSet{best};
    rec.merged = SupportSet(chosen);
    rec.pruned = rec.merged;

    const Vector b = at_iteration(static_cast<int>(step), [&] {
      return ridge_lsq(select_columns(ad, rec.merged), y, opt.norm_bound, 1e-6).coeffs;
    });
    rec.estimate = dict.columns(rec.merged) * b;
    rec.intermediate = rec.estimate;
    require_finite(rec.estimate, static_cast<int>(step));
    r = y - a.matrix * rec.estimate;
    rec.residual_norm = r.norm();
    trace.estimate = rec.estimate;
    trace.iterations.push_back(std::move(rec));
    if (r.norm() <= opt.residual_tol * y_norm) {
      trace.stop_reason = StopReason::ResidualTol;
      break;
    }
  }
  return trace;
}

RecoveryTrace l1_baseline(const SensingMatrix& a, const Dictionary& dict,
                          const Measurements& meas, Index k, const BaselineOptions& opt) {
  check_dims(a, dict, meas);
  if (k < 0 || k > dict.d()) throw InvalidInput("l1_baseline: need 0 <= k <= d");
  const Matrix ad = a.matrix * dict.matrix();
  const Vector& y = meas.y;

  const BasisPursuitResult bp =
      basis_pursuit(ad, hermitian_pinv(ad * ad.adjoint()), y, opt.solver_max_iters,
                    opt.solver_tol, 1e-6);
  const RealVector mags = bp.coeffs.cwiseAbs();
  const Real floor = 1e-9 * mags.maxCoeff();

  std::vector<Index> keep;
  for (Index j : top_k(mags, k))
    if (mags(j) > floor && mags(j) > 0) keep.push_back(j);

  IterationRecord rec;
  rec.proxy_norm = (ad.adjoint() * y).norm();
  rec.identified = SupportSet(keep);
  rec.merged = rec.identified;
  rec.pruned = rec.identified;
  rec.intermediate = dict.matrix() * bp.coeffs;
  if (keep.empty()) {
    rec.estimate = Vector::Zero(dict.n());
  } else {
    const Vector b = ridge_lsq(select_columns(ad, rec.pruned), y, opt.norm_bound, 1e-6).coeffs;
    rec.estimate = dict.columns(rec.pruned) * b;
  }
  require_finite(rec.estimate, 0);
  rec.residual_norm = (y - a.matrix * rec.estimate).norm();

  RecoveryTrace trace;
  trace.stop_reason = rec.residual_norm <= opt.residual_tol * y.norm() ? StopReason::ResidualTol
                                                                       : StopReason::Stall;
  trace.estimate = rec.estimate;
  trace.iterations.push_back(std::move(rec));
  return trace;
}

void write_trace_csv(std::ostream& os, const RecoveryTrace& trace,
                     const std::optional<Vector>& truth) {
  os << "iter,residual_norm,error_to_truth,support\n";
  std::ostringstream line;
  line.precision(17);
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const auto& rec = trace.iterations[i];
    line.str("");
    line << i + 1 << ',' << rec.residual_norm << ',';
    if (truth) line << (*truth - rec.estimate).norm();
    line << ',' << rec.pruned.to_string() << '\n';
    os << line.str();
  }
}

}  // namespace sscosamp
