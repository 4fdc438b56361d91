#include "sscosamp/analysis.hpp"

#include "sscosamp/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace sscosamp {

Real snr_db(const Vector& x_true, const Vector& x_est) {
  if (x_true.size() != x_est.size()) throw InvalidInput("snr_db: length mismatch");
  const Real signal = x_true.norm();
  if (signal == 0) throw InvalidInput("snr_db: zero reference signal");
  const Real err = (x_true - x_est).norm();
  if (err < 1e-300) return std::numeric_limits<Real>::infinity();
  return 20 * std::log10(signal / err);
}

TheoremConstants theorem1_constants(Real delta4k, Real eps1, Real eps2) {
  if (!(delta4k >= 0) || !(delta4k < 1)) throw InvalidInput("theorem1_constants: need 0 <= delta4k < 1");
  if (!(eps1 >= 0) || !(eps2 >= 0)) throw InvalidInput("theorem1_constants: eps must be >= 0");
  TheoremConstants t{delta4k, eps1, eps2, 0, 0};
  t.c1 = ((2 + eps1) * delta4k + eps1) * (2 + eps2) * std::sqrt((1 + delta4k) / (1 - delta4k));
  t.c2 = (2 + eps2) * ((2 + eps1) * (1 + delta4k) + 2) / std::sqrt(1 - delta4k);
  return t;
}

EnvelopeReport corollary1_envelope(const RecoveryTrace& trace, const Vector& x_true,
                                   Real noise_norm, bool preconditions_verified) {
  EnvelopeReport rep;
  rep.advisory = !preconditions_verified;
  const Real xn = x_true.norm();
  auto check = [&](std::size_t l, const Vector& est) {
    const Real err = (x_true - est).norm();
    const Real bound = std::ldexp(xn, -static_cast<int>(l)) + 25.4 * noise_norm;
    rep.error.push_back(err);
    rep.slack.push_back(bound - err);
    if (err > bound) rep.holds = false;
  };
  check(0, Vector::Zero(x_true.size()));
  for (std::size_t l = 0; l < trace.iterations.size(); ++l)
    check(l + 1, trace.iterations[l].estimate);
  return rep;
}

DRipEstimate drip_estimate(const SensingMatrix& a, const Dictionary& dict, Index k, int trials,
                           std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("drip_estimate: trials must be >= 1");
  if (k < 1 || k > dict.d()) throw InvalidInput("drip_estimate: need 1 <= k <= d");
  if (a.n() != dict.n()) throw InvalidInput("drip_estimate: A columns != dictionary rows");

  DRipEstimate est;
  est.order_k = k;
  est.trials = trials;
  est.seed = seed;
  for (int t = 0; t < trials; ++t) {
    const auto coeffs = draw_sparse_coefficients(dict.d(), k, SparsityPattern::uniform(),
                                                 derive_seed(seed, static_cast<std::uint64_t>(t)));
    const Vector x = synthesize(dict, coeffs);
    const Real xx = x.squaredNorm();
    if (std::sqrt(xx) < 1e-12) continue;
    const Real distortion = std::abs((a.matrix * x).squaredNorm() / xx - 1);
    est.samples.push_back(distortion);
    est.delta_lower = std::max(est.delta_lower, distortion);
    ++est.used;
  }
  if (est.used == 0) throw NumericalFailure("drip_estimate: every sample was degenerate");
  return est;
}

Real drip_exhaustive(const SensingMatrix& a, const Dictionary& dict, Index k, std::uint64_t cap) {
  if (k < 1) throw InvalidInput("drip_exhaustive: k must be >= 1");
  if (a.n() != dict.n()) throw InvalidInput("drip_exhaustive: A columns != dictionary rows");
  const Index s = std::min(k, dict.d());
  if (binomial(dict.d(), s) > cap) throw InstanceTooLarge("drip_exhaustive: too many supports");

  Real delta = 0;
  for_each_combination(dict.d(), s, [&](const std::vector<Index>& c) {
    const auto p = build_projector(dict.matrix(), SupportSet(c));
    const Matrix aq = a.matrix * p.basis();
    const Matrix g = aq.adjoint() * aq;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
    const RealVector& ev = eig.eigenvalues();
    delta = std::max({delta, std::abs(ev(0) - 1), std::abs(ev(ev.size() - 1) - 1)});
  });
  return delta;
}

Real mismatch_objective(const Vector& r, Index k) {
  return r.norm() + r.lpNorm<1>() / std::sqrt(static_cast<Real>(k));
}

MismatchReport mismatch(const Dictionary& dict, const Vector& x, Index k, MismatchMode mode,
                        std::uint64_t cap) {
  if (k < 1 || k > dict.d()) throw InvalidInput("mismatch: need 1 <= k <= d");
  if (x.size() != dict.n()) throw InvalidInput("mismatch: x length != n");

  MismatchReport rep;
  rep.k = k;
  rep.mode = mode;
  rep.value = std::numeric_limits<Real>::infinity();
  auto consider = [&](const SupportSet& s) {
    const Matrix ds = dict.columns(s);
    const Vector b = ridge_lsq(ds, x, std::numeric_limits<Real>::infinity()).coeffs;
    const Real v = mismatch_objective(x - ds * b, k);
    if (v < rep.value) {
      rep.value = v;
      rep.minimizer = SparseCoefficients{s, b, dict.d()};
    }
  };

  if (mode == MismatchMode::Greedy) {
    consider(project_support(ProjectionBackend::omp(), dict, x, k));
    return rep;
  }
  if (binomial(dict.d(), k) > cap)
    throw InstanceTooLarge("mismatch: support enumeration exceeds cap; use greedy mode");
  for_each_combination(dict.d(), k, [&](const std::vector<Index>& c) { consider(SupportSet(c)); });
  return rep;
}

TailCheck upper_rip_tail_check(const SensingMatrix& a, Index k, const Vector& z, Real delta_k) {
  if (k < 1) throw InvalidInput("upper_rip_tail_check: k must be >= 1");
  if (z.size() != a.n()) throw InvalidInput("upper_rip_tail_check: z length != n");
  TailCheck t;
  t.lhs = (a.matrix * z).norm();
  t.rhs = std::sqrt(1 + delta_k) * (z.norm() + z.lpNorm<1>() / std::sqrt(static_cast<Real>(k)));
  t.slack = t.rhs - t.lhs;
  t.holds = t.lhs <= t.rhs;
  return t;
}

}  // namespace sscosamp
