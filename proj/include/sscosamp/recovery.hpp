#pragma once

// Signal Space CoSaMP and the coefficient-space baselines (CoSaMP, OMP and
// basis pursuit on the product A D). Every routine returns a full trace.

#include "sscosamp/model.hpp"
#include "sscosamp/projections.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace sscosamp {

enum class StopReason { ResidualTol, Stall, MaxIters };

std::string_view to_string(StopReason r);

struct IterationRecord {
  Real proxy_norm = 0;       // ||h||
  SupportSet identified;     // Omega
  SupportSet merged;         // T
  Vector intermediate;       // x~ = D_T b
  SupportSet pruned;         // Gamma
  Vector estimate;           // x^{l+1}
  Real residual_norm = 0;    // ||y - A x^{l+1}||
};

struct RecoveryTrace {
  std::vector<IterationRecord> iterations;
  Vector estimate;  // final x-hat
  StopReason stop_reason = StopReason::MaxIters;

  int iterations_run() const { return static_cast<int>(iterations.size()); }
};

struct SSCoSaMPConfig {
  Index k = 1;
  ProjectionBackend identify_backend;
  ProjectionBackend prune_backend;
  int max_iters = 50;
  Real residual_tol = 1e-12;
  Real stall_tol = 1e-10;
  Real tikhonov_norm_bound = std::numeric_limits<Real>::infinity();
  Real tikhonov_tol = 1e-6;
};

/// Signal Space CoSaMP. Each iteration: h = A^H r; Omega = S_D(h, 2k);
/// T = Omega u Gamma; x~ = D_T b with b the Tikhonov-constrained fit of y;
/// Gamma = S_D(x~, k); x = P_Gamma x~; r = y - A x. Stops on
/// ||r|| <= residual_tol ||y||, on ||x_new - x|| <= stall_tol ||x||, or
/// after max_iters.
RecoveryTrace sscosamp(const SensingMatrix& a, const Dictionary& dict, const Measurements& y,
                       const SSCoSaMPConfig& cfg);

struct BaselineOptions {
  int max_iters = 50;
  Real residual_tol = 1e-12;
  Real stall_tol = 1e-10;
  Real norm_bound = std::numeric_limits<Real>::infinity();
  bool normalize_columns = true;  // OMP selection on normalized columns of A D
  Real solver_tol = 1e-4;         // basis pursuit
  int solver_max_iters = 5000;
};

/// CoSaMP on the product matrix A D with coefficient-space thresholding.
RecoveryTrace cosamp_baseline(const SensingMatrix& a, const Dictionary& dict,
                              const Measurements& y, Index k, const BaselineOptions& opt = {});

/// k greedy correlation steps on A D with a least-squares refit each step.
RecoveryTrace omp_baseline(const SensingMatrix& a, const Dictionary& dict, const Measurements& y,
                           Index k, const BaselineOptions& opt = {});

/// Basis pursuit on A D, keep the k largest coefficients (entries below
/// 1e-9 of the largest magnitude are dropped), then debias by least squares.
RecoveryTrace l1_baseline(const SensingMatrix& a, const Dictionary& dict, const Measurements& y,
                          Index k, const BaselineOptions& opt = {});

/// One row per iteration: iter,residual_norm,error_to_truth,support.
/// error_to_truth is left empty without ground truth.
void write_trace_csv(std::ostream& os, const RecoveryTrace& trace,
                     const std::optional<Vector>& truth = std::nullopt);

}  // namespace sscosamp
