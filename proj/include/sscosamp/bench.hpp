#pragma once

// Seeded Monte-Carlo harness: phase-transition sweeps over the number of
// measurements and projection-quality studies, written as long-format CSV.

#include "sscosamp/analysis.hpp"
#include "sscosamp/projections.hpp"
#include "sscosamp/recovery.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sscosamp {

/// Flat "key = value" configuration; '#' starts a comment. Every key must be
/// consumed, so typos surface as errors.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig parse(std::istream& is);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  Real get_real(const std::string& key, Real fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;

  /// Throws InvalidInput naming any key that was never read.
  void require_all_used() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

enum class Scenario { RescaledIdentity, DftSeparated, DftClustered, DftHybrid };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

enum class AlgorithmKind { SSCoSaMP, CoSaMP, Omp, L1 };

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::SSCoSaMP;
  ProjectionMethod backend = ProjectionMethod::Threshold;  // SSCoSaMP only

  std::string name() const;
  /// "sscosamp-<backend>", "cosamp", "omp" or "l1".
  static AlgorithmSpec parse(std::string_view name);
};

struct SweepConfig {
  Scenario scenario = Scenario::RescaledIdentity;
  Index n = 256;
  Index redundancy = 4;  // DFT scenarios; d = redundancy * n
  Index k = 8;
  std::vector<Index> m_grid;
  int trials_per_point = 20;
  std::vector<AlgorithmSpec> algorithms;
  Real noise_norm = 0;
  std::uint64_t master_seed = 0;
  Real snr_threshold_db = kPerfectRecoveryDb;

  Real rescale = 100;         // rescaled-identity diagonal
  Index min_gap = 8;          // zeros between separated nonzeros
  int max_iters = 0;          // 0: 50, or 100 for clustered/hybrid supports
  Real norm_bound_factor = 10;  // Tikhonov bound = factor * ||alpha||
  int inner_cosamp_iters = 20;
  int l1_max_iters = 5000;    // basis pursuit (L1 backend and l1 baseline)
  Real l1_tol = 1e-4;
  int threads = 1;
  bool measure_time = false;  // wall_ms is 0 unless set, keeping output reproducible

  Index d() const { return scenario == Scenario::RescaledIdentity ? n : redundancy * n; }
  int effective_max_iters() const;
  void validate() const;

  static SweepConfig from_config(const KeyValueConfig& kv);
};

struct TrialRow {
  Scenario scenario{};
  std::string algorithm;
  Index m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  Real snr_db = 0;  // NaN when the run failed
  bool success = false;
  int iterations = 0;
  Real wall_ms = 0;
  std::string stop_reason;  // "error" for failed runs
};

struct PointSummary {
  std::string algorithm;
  Index m = 0;
  int trials = 0;
  int successes = 0;
  Real success_rate = 0;
  Real mean_snr_db = 0;  // SNR capped at 300 dB before averaging
  Real mean_iterations = 0;
  Real mean_wall_ms = 0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<TrialRow> rows;  // sorted by (m, trial, algorithm order)
  std::vector<PointSummary> summary;

  const PointSummary& at(std::string_view algorithm, Index m) const;
};

/// Seed of one trial: derived from (master_seed, scenario, m, trial).
std::uint64_t trial_seed(std::uint64_t master_seed, Scenario scenario, Index m, int trial);

/// A fully drawn benchmark instance.
struct Instance {
  Dictionary dict;
  SensingMatrix a;
  SparseCoefficients alpha;
  Vector x;
  Measurements y;
};

Dictionary scenario_dictionary(const SweepConfig& cfg);
Instance draw_instance(const SweepConfig& cfg, const Dictionary& dict, Index m,
                       std::uint64_t seed);

/// Runs one algorithm on one instance.
RecoveryTrace run_algorithm(const AlgorithmSpec& alg, const SweepConfig& cfg,
                            const Instance& inst);

SweepResult run_sweep(const SweepConfig& cfg);

std::vector<PointSummary> summarize(const std::vector<TrialRow>& rows,
                                    const std::vector<AlgorithmSpec>& algorithms,
                                    const std::vector<Index>& m_grid);

/// CSV columns: scenario,algorithm,m,trial,seed,snr_db,success,iterations,wall_ms,stop_reason
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// CSV columns: algorithm,m,trials,successes,success_rate,mean_snr_db,mean_iterations,mean_wall_ms
void write_summary_csv(std::ostream& os, const SweepResult& result);
void write_sweep_json(std::ostream& os, const SweepResult& result);

struct ProjectionStudyConfig {
  Index n = 16;
  Index redundancy = 2;
  Index k = 2;
  std::vector<SparsityPattern> patterns;
  std::vector<ProjectionMethod> backends;
  int trials = 20;
  std::uint64_t seed = 0;
  Real perturbation = 0.05;  // relative white-noise level added to D a
  bool orthonormal = false;  // use the unitary DFT (redundancy forced to 1)

  static ProjectionStudyConfig from_config(const KeyValueConfig& kv);
};

struct ProjectionStudyRow {
  std::string backend;
  std::string pattern;
  int trial = 0;
  std::uint64_t seed = 0;
  ProjectionQuality quality;
};

std::string_view to_string(PatternKind p);

std::vector<ProjectionStudyRow> run_projection_study(const ProjectionStudyConfig& cfg);

/// CSV columns: backend,pattern,trial,seed,eps1,eps2,opt_residual; infinities print as `inf`.
void write_projection_csv(std::ostream& os, const std::vector<ProjectionStudyRow>& rows);
void write_projection_json(std::ostream& os, const std::vector<ProjectionStudyRow>& rows);

/// Shortest round-trip decimal text; `inf` / `nan` for non-finite values.
std::string format_real(Real v);

}  // namespace sscosamp
