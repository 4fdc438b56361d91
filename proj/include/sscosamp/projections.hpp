#pragma once

// Support identification S_D(z, k): pick k atoms of D whose span captures
// z nearly as well as the best k-atom subspace. Several heuristic backends
// plus an exhaustive oracle and the (eps1, eps2) quality measurement.

#include "sscosamp/linalg.hpp"
#include "sscosamp/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sscosamp {

enum class ProjectionMethod { Threshold, Omp, Cosamp, L1, Exhaustive };

std::string_view to_string(ProjectionMethod m);
ProjectionMethod parse_projection_method(std::string_view name);

inline constexpr std::uint64_t kDefaultEnumerationCap = 2'000'000;

struct ProjectionBackend {
  ProjectionMethod method = ProjectionMethod::Threshold;

  // CoSaMP: inner iterations on z ~ D a, and the coefficient norm bound of
  // its Tikhonov update. Without an absolute bound the solver uses
  // cosamp_bound_factor * ||z|| / min_j ||D_j||.
  int cosamp_iters = 20;
  std::optional<Real> cosamp_norm_bound;
  Real cosamp_bound_factor = 10;

  // L1: ADMM basis pursuit. Converged when primal and dual residuals fall
  // below l1_tol (relative) or the fit reaches the ball ||z - D a|| <= sigma,
  // sigma = l1_sigma_rel * ||z||.
  int l1_max_iters = 5000;
  Real l1_tol = 1e-4;
  Real l1_sigma_rel = 1e-6;

  std::uint64_t enumeration_cap = kDefaultEnumerationCap;

  static ProjectionBackend threshold() { return {}; }
  static ProjectionBackend omp() { return with(ProjectionMethod::Omp); }
  static ProjectionBackend cosamp() { return with(ProjectionMethod::Cosamp); }
  static ProjectionBackend l1() { return with(ProjectionMethod::L1); }
  static ProjectionBackend exhaustive() { return with(ProjectionMethod::Exhaustive); }

 private:
  static ProjectionBackend with(ProjectionMethod m) {
    ProjectionBackend b;
    b.method = m;
    return b;
  }
};

/// Throws InvalidInput unless every parameter is in range.
void validate(const ProjectionBackend& backend);

/// Exactly k column indices approximating the best k-term subspace for z.
SupportSet project_support(const ProjectionBackend& backend, const Dictionary& dict,
                           const Vector& z, Index k);

/// Indices of the k largest entries of `scores`; ties go to the lower index.
SupportSet top_k(const RealVector& scores, Index k);

/// Calls fn(indices) for every k-subset of {0..d-1} in lexicographic order.
template <typename Fn>
void for_each_combination(Index d, Index k, Fn&& fn) {
  if (k < 0 || k > d) return;
  std::vector<Index> c(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) c[i] = i;
  while (true) {
    fn(static_cast<const std::vector<Index>&>(c));
    Index i = k - 1;
    while (i >= 0 && c[i] == d - k + i) --i;
    if (i < 0) return;
    ++c[i];
    for (Index j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

/// Number of k-subsets of d items, saturating at UINT64_MAX.
std::uint64_t binomial(Index d, Index k);

struct OptimalProjection {
  SupportSet support;
  Vector projection;  // P_opt z
  Real residual = 0;  // ||z - P_opt z||
};

/// argmin over all |S| = k of ||z - P_S z|| by full enumeration. Ties (within
/// 1e-14 ||z||) keep the lexicographically first support.
OptimalProjection optimal_projection(const Dictionary& dict, const Vector& z, Index k,
                                     std::uint64_t cap = kDefaultEnumerationCap);

struct ProjectionQuality {
  Real eps1 = 0;
  Real eps2 = 0;
  bool eps1_infinite = false;
  bool eps2_infinite = false;
  Real opt_residual = 0;  // ||z - P_opt z||
  Real opt_norm = 0;      // ||P_opt z||
  Real gap = 0;           // ||P_opt z - P_est z||
};

/// Effective (eps1, eps2) of a backend against the exhaustive optimum.
/// A gap at or below 1e-12 ||z|| counts as exact (eps = 0); otherwise a
/// denominator below that floor yields an infinite eps.
ProjectionQuality evaluate_projection_quality(const Dictionary& dict, const Vector& z, Index k,
                                              const ProjectionBackend& backend);

struct BasisPursuitResult {
  Vector coeffs;  // sparse (shrunk) iterate
  int iterations = 0;
  Real primal_residual = 0;
  Real dual_residual = 0;
  Real fit_residual = 0;  // ||z - M coeffs||
};

/// min ||a||_1 subject to M a = z (relaxed to ||z - M a|| <= sigma_rel ||z||)
/// by ADMM. `gram_pinv` is the pseudo-inverse of M M^H. Throws
/// NumericalFailure with the final residuals if max_iters is exhausted.
BasisPursuitResult basis_pursuit(const Matrix& m, const Matrix& gram_pinv, const Vector& z,
                                 int max_iters, Real tol, Real sigma_rel);

}  // namespace sscosamp
