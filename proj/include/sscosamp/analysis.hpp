#pragma once

// Recovery metrics and diagnostics tied to the convergence theory: SNR and
// the perfect-recovery test, the iteration constants, the geometric error
// envelope, empirical D-RIP constants, model mismatch and the upper-RIP
// tail inequality.

#include "sscosamp/model.hpp"
#include "sscosamp/projections.hpp"
#include "sscosamp/recovery.hpp"

#include <cstdint>
#include <vector>

namespace sscosamp {

inline constexpr Real kPerfectRecoveryDb = 100.0;

/// 20 log10(||x|| / ||x - x_est||); +infinity when the error is below 1e-300.
Real snr_db(const Vector& x_true, const Vector& x_est);

struct TheoremConstants {
  Real delta4k = 0;
  Real eps1 = 0;
  Real eps2 = 0;
  Real c1 = 0;  // error contraction per iteration
  Real c2 = 0;  // noise amplification per iteration

  bool contracts() const { return c1 < 1; }
};

/// C1 = ((2 + e1) d + e1)(2 + e2) sqrt((1 + d)/(1 - d)),
/// C2 = (2 + e2)((2 + e1)(1 + d) + 2) / sqrt(1 - d), with d = delta4k.
TheoremConstants theorem1_constants(Real delta4k, Real eps1, Real eps2);

struct EnvelopeReport {
  bool holds = true;
  bool advisory = true;       // false only when the caller verified the preconditions
  std::vector<Real> slack;    // bound - error for l = 0, 1, ..., iterations
  std::vector<Real> error;    // ||x - x^l||
};

/// Checks ||x - x^l|| <= 2^{-l} ||x|| + 25.4 ||e|| for every iterate,
/// starting from x^0 = 0. Binding only under delta4k <= 0.029 with
/// (eps1, eps2) = (0.1, 1); pass `preconditions_verified` when that holds.
EnvelopeReport corollary1_envelope(const RecoveryTrace& trace, const Vector& x_true,
                                   Real noise_norm, bool preconditions_verified = false);

struct DRipEstimate {
  Index order_k = 0;
  Real delta_lower = 0;       // max sampled distortion |‖ADa‖^2/‖Da‖^2 - 1|
  int trials = 0;             // requested
  int used = 0;               // non-degenerate samples
  std::uint64_t seed = 0;
  std::vector<Real> samples;  // distortion per used sample, in draw order

  bool valid_rip() const { return delta_lower < 1; }
};

/// Monte-Carlo lower bound on delta_k: random supports, complex Gaussian
/// values. Samples with ||D a|| < 1e-12 are skipped. Sample t depends only
/// on (seed, t), so estimates are nested in `trials`.
DRipEstimate drip_estimate(const SensingMatrix& a, const Dictionary& dict, Index k, int trials,
                           std::uint64_t seed);

/// Exact delta_k: max over all supports of size min(k, d) of the extreme
/// eigenvalue deviation of Q^H A^H A Q, Q an orthonormal basis of R(D_S).
Real drip_exhaustive(const SensingMatrix& a, const Dictionary& dict, Index k,
                     std::uint64_t cap = kDefaultEnumerationCap);

enum class MismatchMode { Exhaustive, Greedy };

struct MismatchReport {
  Index k = 0;
  Real value = 0;
  SparseCoefficients minimizer;
  bool upper_bound = true;  // per-support least squares fits only the l2 term
  MismatchMode mode = MismatchMode::Exhaustive;
};

/// Upper bound on inf over k-sparse a of ||x - D a|| + ||x - D a||_1 / sqrt(k).
/// Exhaustive mode enumerates supports (InstanceTooLarge past `cap`); greedy
/// mode evaluates only the OMP support.
MismatchReport mismatch(const Dictionary& dict, const Vector& x, Index k,
                        MismatchMode mode = MismatchMode::Exhaustive,
                        std::uint64_t cap = kDefaultEnumerationCap);

/// Mixed objective ||r|| + ||r||_1 / sqrt(k).
Real mismatch_objective(const Vector& r, Index k);

struct TailCheck {
  bool holds = true;
  Real lhs = 0;    // ||A z||
  Real rhs = 0;    // sqrt(1 + delta)(||z|| + ||z||_1 / sqrt(k))
  Real slack = 0;  // rhs - lhs
};

/// ||A z|| <= sqrt(1 + delta_k) [ ||z|| + ||z||_1 / sqrt(k) ].
TailCheck upper_rip_tail_check(const SensingMatrix& a, Index k, const Vector& z, Real delta_k);

}  // namespace sscosamp
