#include "sscosamp/bench.hpp"

#include "sscosamp/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace sscosamp {

// ---------------------------------------------------------------- config

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& is) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InvalidInput("config line " + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key))
      throw InvalidInput("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  return parse(in);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_.insert(key);
  return it->second;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw InvalidInput("config key '" + key + "': cannot parse '" + text + "'");
  return v;
}

}  // namespace

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? parse_number<std::int64_t>(key, get_string(key, "")) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? parse_number<std::uint64_t>(key, get_string(key, "")) : fallback;
}

Real KeyValueConfig::get_real(const std::string& key, Real fallback) const {
  return has(key) ? parse_number<Real>(key, get_string(key, "")) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key, "");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidInput("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key,
                                                  const std::vector<std::string>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::string> out;
  std::istringstream ss(get_string(key, ""));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void KeyValueConfig::require_all_used() const {
  for (const auto& [key, value] : values_)
    if (!used_.count(key)) throw InvalidInput("unknown config key '" + key + "'");
}

// ---------------------------------------------------------------- names

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::RescaledIdentity: return "rescaled-identity";
    case Scenario::DftSeparated: return "dft-separated";
    case Scenario::DftClustered: return "dft-clustered";
    case Scenario::DftHybrid: return "dft-hybrid";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  for (auto s : {Scenario::RescaledIdentity, Scenario::DftSeparated, Scenario::DftClustered,
                 Scenario::DftHybrid})
    if (to_string(s) == name) return s;
  throw InvalidInput("unknown scenario '" + std::string(name) + "'");
}

std::string AlgorithmSpec::name() const {
  switch (kind) {
    case AlgorithmKind::SSCoSaMP: return "sscosamp-" + std::string(to_string(backend));
    case AlgorithmKind::CoSaMP: return "cosamp";
    case AlgorithmKind::Omp: return "omp";
    case AlgorithmKind::L1: return "l1";
  }
  return "?";
}

AlgorithmSpec AlgorithmSpec::parse(std::string_view name) {
  constexpr std::string_view prefix = "sscosamp-";
  if (name.substr(0, prefix.size()) == prefix)
    return {AlgorithmKind::SSCoSaMP, parse_projection_method(name.substr(prefix.size()))};
  if (name == "cosamp") return {AlgorithmKind::CoSaMP, ProjectionMethod::Threshold};
  if (name == "omp") return {AlgorithmKind::Omp, ProjectionMethod::Threshold};
  if (name == "l1") return {AlgorithmKind::L1, ProjectionMethod::Threshold};
  throw InvalidInput("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(PatternKind p) {
  switch (p) {
    case PatternKind::UniformRandom: return "uniform";
    case PatternKind::WellSeparated: return "separated";
    case PatternKind::ClusteredBlock: return "clustered";
    case PatternKind::Hybrid: return "hybrid";
  }
  return "?";
}

std::string format_real(Real v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------- sweep

int SweepConfig::effective_max_iters() const {
  if (max_iters > 0) return max_iters;
  return scenario == Scenario::DftClustered || scenario == Scenario::DftHybrid ? 100 : 50;
}

void SweepConfig::validate() const {
  if (n < 2 || k < 1 || redundancy < 1) throw InvalidInput("sweep: need n >= 2, k >= 1, redundancy >= 1");
  if (2 * k > d()) throw InvalidInput("sweep: need 2k <= d");
  if (m_grid.empty()) throw InvalidInput("sweep: m_grid is empty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (m_grid[i] < 1 || m_grid[i] > n) throw InvalidInput("sweep: m_grid entries must lie in [1, n]");
    if (i && m_grid[i] <= m_grid[i - 1]) throw InvalidInput("sweep: m_grid must be strictly increasing");
  }
  if (trials_per_point < 1) throw InvalidInput("sweep: trials_per_point must be >= 1");
  if (algorithms.empty()) throw InvalidInput("sweep: no algorithms configured");
  if (!(noise_norm >= 0) || !(norm_bound_factor > 0) || !(rescale > 0))
    throw InvalidInput("sweep: noise_norm >= 0, norm_bound_factor > 0, rescale > 0 required");
  if (threads < 1) throw InvalidInput("sweep: threads must be >= 1");
  if (l1_max_iters < 1 || !(l1_tol > 0)) throw InvalidInput("sweep: l1_max_iters and l1_tol must be positive");
}

SweepConfig SweepConfig::from_config(const KeyValueConfig& kv) {
  SweepConfig c;
  c.scenario = parse_scenario(kv.get_string("scenario", std::string(to_string(c.scenario))));
  c.n = kv.get_int("n", c.n);
  c.redundancy = kv.get_int("redundancy", c.redundancy);
  c.k = kv.get_int("k", c.k);
  for (const auto& m : kv.get_list("m_grid", {})) c.m_grid.push_back(parse_number<Index>("m_grid", m));
  c.trials_per_point = static_cast<int>(kv.get_int("trials_per_point", c.trials_per_point));
  for (const auto& a : kv.get_list("algorithms", {"sscosamp-threshold", "cosamp"}))
    c.algorithms.push_back(AlgorithmSpec::parse(a));
  c.noise_norm = kv.get_real("noise_norm", c.noise_norm);
  c.master_seed = kv.get_u64("seed", c.master_seed);
  c.snr_threshold_db = kv.get_real("snr_threshold_db", c.snr_threshold_db);
  c.rescale = kv.get_real("rescale", c.rescale);
  c.min_gap = kv.get_int("min_gap", c.min_gap);
  c.max_iters = static_cast<int>(kv.get_int("max_iters", c.max_iters));
  c.norm_bound_factor = kv.get_real("norm_bound_factor", c.norm_bound_factor);
  c.inner_cosamp_iters = static_cast<int>(kv.get_int("inner_cosamp_iters", c.inner_cosamp_iters));
  c.threads = static_cast<int>(kv.get_int("threads", c.threads));
  c.l1_max_iters = static_cast<int>(kv.get_int("l1_max_iters", c.l1_max_iters));
  c.l1_tol = kv.get_real("l1_tol", c.l1_tol);
  kv.require_all_used();
  c.validate();
  return c;
}

std::uint64_t trial_seed(std::uint64_t master_seed, Scenario scenario, Index m, int trial) {
  return derive_seed(master_seed, label_hash(to_string(scenario)), static_cast<std::uint64_t>(m),
                     static_cast<std::uint64_t>(trial));
}

Dictionary scenario_dictionary(const SweepConfig& cfg) {
  if (cfg.scenario == Scenario::RescaledIdentity) return build_rescaled_identity(cfg.n, cfg.rescale);
  return build_overcomplete_dft(cfg.n, cfg.redundancy);
}

Instance draw_instance(const SweepConfig& cfg, const Dictionary& dict, Index m,
                       std::uint64_t seed) {
  SparsityPattern pattern;
  bool real_values = false;
  switch (cfg.scenario) {
    case Scenario::RescaledIdentity:
      real_values = true;
      break;
    case Scenario::DftSeparated:
      pattern = SparsityPattern::well_separated(cfg.min_gap, dict.cyclic());
      break;
    case Scenario::DftClustered:
      pattern = SparsityPattern::clustered();
      break;
    case Scenario::DftHybrid:
      pattern = SparsityPattern::hybrid(cfg.min_gap, dict.cyclic());
      break;
  }
  SensingMatrix a = draw_gaussian_sensing(m, cfg.n, derive_seed(seed, 1));
  SparseCoefficients alpha =
      draw_sparse_coefficients(dict.d(), cfg.k, pattern, derive_seed(seed, 2), real_values);
  Vector x = synthesize(dict, alpha);
  Measurements y = measure(a, x, cfg.noise_norm, derive_seed(seed, 3));
  return Instance{dict, std::move(a), std::move(alpha), std::move(x), std::move(y)};
}

RecoveryTrace run_algorithm(const AlgorithmSpec& alg, const SweepConfig& cfg,
                            const Instance& inst) {
  const Real bound = cfg.norm_bound_factor * inst.alpha.values.norm();
  const Real safe_bound = bound > 0 ? bound : std::numeric_limits<Real>::infinity();
  switch (alg.kind) {
    case AlgorithmKind::SSCoSaMP: {
      SSCoSaMPConfig sc;
      sc.k = cfg.k;
      sc.identify_backend.method = alg.backend;
      sc.identify_backend.cosamp_iters = cfg.inner_cosamp_iters;
      sc.identify_backend.cosamp_norm_bound = safe_bound;
      sc.identify_backend.l1_max_iters = cfg.l1_max_iters;
      sc.identify_backend.l1_tol = cfg.l1_tol;
      sc.prune_backend = sc.identify_backend;
      sc.max_iters = cfg.effective_max_iters();
      sc.tikhonov_norm_bound = safe_bound;
      return sscosamp(inst.a, inst.dict, inst.y, sc);
    }
    case AlgorithmKind::CoSaMP:
    case AlgorithmKind::Omp:
    case AlgorithmKind::L1: {
      BaselineOptions opt;
      opt.max_iters = cfg.effective_max_iters();
      opt.norm_bound = safe_bound;
      opt.solver_max_iters = cfg.l1_max_iters;
      opt.solver_tol = cfg.l1_tol;
      if (alg.kind == AlgorithmKind::CoSaMP) return cosamp_baseline(inst.a, inst.dict, inst.y, cfg.k, opt);
      if (alg.kind == AlgorithmKind::Omp) return omp_baseline(inst.a, inst.dict, inst.y, cfg.k, opt);
      return l1_baseline(inst.a, inst.dict, inst.y, cfg.k, opt);
    }
  }
  throw InvalidInput("run_algorithm: unknown algorithm");
}

const PointSummary& SweepResult::at(std::string_view algorithm, Index m) const {
  for (const auto& s : summary)
    if (s.algorithm == algorithm && s.m == m) return s;
  throw InvalidInput("SweepResult::at: no summary for " + std::string(algorithm) + " at m = " +
                     std::to_string(m));
}

std::vector<PointSummary> summarize(const std::vector<TrialRow>& rows,
                                    const std::vector<AlgorithmSpec>& algorithms,
                                    const std::vector<Index>& m_grid) {
  std::vector<PointSummary> out;
  for (Index m : m_grid) {
    for (const auto& alg : algorithms) {
      PointSummary s;
      s.algorithm = alg.name();
      s.m = m;
      Real snr_sum = 0, iter_sum = 0, wall_sum = 0;
      for (const auto& r : rows) {
        if (r.m != m || r.algorithm != s.algorithm) continue;
        ++s.trials;
        s.successes += r.success ? 1 : 0;
        snr_sum += std::isnan(r.snr_db) ? 0 : std::min(r.snr_db, 300.0);
        iter_sum += r.iterations;
        wall_sum += r.wall_ms;
      }
      if (s.trials > 0) {
        s.success_rate = static_cast<Real>(s.successes) / s.trials;
        s.mean_snr_db = snr_sum / s.trials;
        s.mean_iterations = iter_sum / s.trials;
        s.mean_wall_ms = wall_sum / s.trials;
      }
      out.push_back(s);
    }
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const Dictionary dict = scenario_dictionary(cfg);
  const auto n_alg = cfg.algorithms.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials_per_point);
  const std::size_t tasks = cfg.m_grid.size() * n_trials;
  std::vector<TrialRow> rows(tasks * n_alg);

  auto run_task = [&](std::size_t task) {
    const Index m = cfg.m_grid[task / n_trials];
    const int trial = static_cast<int>(task % n_trials);
    const std::uint64_t seed = trial_seed(cfg.master_seed, cfg.scenario, m, trial);
    const Instance inst = draw_instance(cfg, dict, m, seed);
    for (std::size_t ai = 0; ai < n_alg; ++ai) {
      TrialRow& row = rows[task * n_alg + ai];
      row.scenario = cfg.scenario;
      row.algorithm = cfg.algorithms[ai].name();
      row.m = m;
      row.trial = trial;
      row.seed = seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        const RecoveryTrace trace = run_algorithm(cfg.algorithms[ai], cfg, inst);
        row.snr_db = snr_db(inst.x, trace.estimate);
        row.success = row.snr_db >= cfg.snr_threshold_db;
        row.iterations = trace.iterations_run();
        row.stop_reason = std::string(to_string(trace.stop_reason));
      } catch (const NumericalFailure&) {
        row.snr_db = std::numeric_limits<Real>::quiet_NaN();
        row.success = false;
        row.stop_reason = "error";
      }
      if (cfg.measure_time) {
        row.wall_ms = std::chrono::duration<Real, std::milli>(std::chrono::steady_clock::now() - start)
                          .count();
      }
    }
  };

  if (cfg.threads <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < cfg.threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
          try {
            run_task(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  SweepResult result{cfg, std::move(rows), {}};
  result.summary = summarize(result.rows, cfg.algorithms, cfg.m_grid);
  return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << "scenario,algorithm,m,trial,seed,snr_db,success,iterations,wall_ms,stop_reason\n";
  for (const auto& r : result.rows) {
    os << to_string(r.scenario) << ',' << r.algorithm << ',' << r.m << ',' << r.trial << ','
       << r.seed << ',' << format_real(r.snr_db) << ',' << (r.success ? 1 : 0) << ','
       << r.iterations << ',' << format_real(r.wall_ms) << ',' << r.stop_reason << '\n';
  }
}

void write_summary_csv(std::ostream& os, const SweepResult& result) {
  os << "algorithm,m,trials,successes,success_rate,mean_snr_db,mean_iterations,mean_wall_ms\n";
  for (const auto& s : result.summary) {
    os << s.algorithm << ',' << s.m << ',' << s.trials << ',' << s.successes << ','
       << format_real(s.success_rate) << ',' << format_real(s.mean_snr_db) << ','
       << format_real(s.mean_iterations) << ',' << format_real(s.mean_wall_ms) << '\n';
  }
}

namespace {

nlohmann::json json_real(Real v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

}  // namespace

void write_sweep_json(std::ostream& os, const SweepResult& result) {
  const SweepConfig& c = result.config;
  nlohmann::json j;
  j["config"] = {{"scenario", to_string(c.scenario)},
                 {"n", c.n},
                 {"d", c.d()},
                 {"k", c.k},
                 {"m_grid", c.m_grid},
                 {"trials_per_point", c.trials_per_point},
                 {"noise_norm", c.noise_norm},
                 {"seed", c.master_seed},
                 {"snr_threshold_db", c.snr_threshold_db},
                 {"max_iters", c.effective_max_iters()},
                 {"norm_bound_factor", c.norm_bound_factor}};
  auto& summary = j["summary"] = nlohmann::json::array();
  for (const auto& s : result.summary) {
    summary.push_back({{"algorithm", s.algorithm},
                       {"m", s.m},
                       {"trials", s.trials},
                       {"successes", s.successes},
                       {"success_rate", s.success_rate},
                       {"mean_snr_db", json_real(s.mean_snr_db)},
                       {"mean_iterations", s.mean_iterations},
                       {"mean_wall_ms", s.mean_wall_ms}});
  }
  auto& rows = j["trials"] = nlohmann::json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"algorithm", r.algorithm},
                    {"m", r.m},
                    {"trial", r.trial},
                    {"seed", r.seed},
                    {"snr_db", json_real(r.snr_db)},
                    {"success", r.success},
                    {"iterations", r.iterations},
                    {"wall_ms", r.wall_ms},
                    {"stop_reason", r.stop_reason}});
  }
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- projection study

ProjectionStudyConfig ProjectionStudyConfig::from_config(const KeyValueConfig& kv) {
  ProjectionStudyConfig c;
  c.n = kv.get_int("n", c.n);
  c.redundancy = kv.get_int("redundancy", c.redundancy);
  c.k = kv.get_int("k", c.k);
  const Index gap = kv.get_int("min_gap", 2);
  for (const auto& p : kv.get_list("patterns", {"separated", "clustered"})) {
    if (p == "separated") c.patterns.push_back(SparsityPattern::well_separated(gap, true));
    else if (p == "clustered") c.patterns.push_back(SparsityPattern::clustered());
    else if (p == "hybrid") c.patterns.push_back(SparsityPattern::hybrid(gap, true));
    else if (p == "uniform") c.patterns.push_back(SparsityPattern::uniform());
    else throw InvalidInput("unknown pattern '" + p + "'");
  }
  for (const auto& b : kv.get_list("backends", {"omp", "cosamp", "l1"}))
    c.backends.push_back(parse_projection_method(b));
  c.trials = static_cast<int>(kv.get_int("trials", c.trials));
  c.seed = kv.get_u64("seed", c.seed);
  c.perturbation = kv.get_real("perturbation", c.perturbation);
  c.orthonormal = kv.get_bool("orthonormal", c.orthonormal);
  kv.require_all_used();
  if (c.trials < 1 || c.k < 1 || c.n < 2 || c.redundancy < 1 || !(c.perturbation >= 0))
    throw InvalidInput("project-eval: invalid sizes or perturbation");
  return c;
}

std::vector<ProjectionStudyRow> run_projection_study(const ProjectionStudyConfig& cfg) {
  const Dictionary dict = build_overcomplete_dft(cfg.n, cfg.orthonormal ? 1 : cfg.redundancy);
  if (binomial(dict.d(), cfg.k) > kDefaultEnumerationCap)
    throw InstanceTooLarge("project-eval: instance exceeds the exhaustive enumeration cap");

  std::vector<ProjectionStudyRow> rows;
  for (const auto& pattern : cfg.patterns) {
    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t seed =
          derive_seed(cfg.seed, label_hash(to_string(pattern.kind)), static_cast<std::uint64_t>(t));
      const auto alpha = draw_sparse_coefficients(dict.d(), cfg.k, pattern, derive_seed(seed, 1));
      Vector z = synthesize(dict, alpha);
      if (cfg.perturbation > 0) {
        Rng gen(derive_seed(seed, 2));
        Vector e = complex_normal_vector(dict.n(), gen);
        z += e * (cfg.perturbation * z.norm() / e.norm());
      }
      for (ProjectionMethod method : cfg.backends) {
        ProjectionBackend backend;
        backend.method = method;
        rows.push_back({std::string(to_string(method)), std::string(to_string(pattern.kind)), t, seed,
                        evaluate_projection_quality(dict, z, cfg.k, backend)});
      }
    }
  }
  return rows;
}

void write_projection_csv(std::ostream& os, const std::vector<ProjectionStudyRow>& rows) {
  os << "backend,pattern,trial,seed,eps1,eps2,opt_residual\n";
  for (const auto& r : rows) {
    os << r.backend << ',' << r.pattern << ',' << r.trial << ',' << r.seed << ','
       << format_real(r.quality.eps1) << ',' << format_real(r.quality.eps2) << ','
       << format_real(r.quality.opt_residual) << '\n';
  }
}

void write_projection_json(std::ostream& os, const std::vector<ProjectionStudyRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"backend", r.backend},
                 {"pattern", r.pattern},
                 {"trial", r.trial},
                 {"seed", r.seed},
                 {"eps1", json_real(r.quality.eps1)},
                 {"eps2", json_real(r.quality.eps2)},
                 {"opt_residual", r.quality.opt_residual}});
  }
  os << j.dump(2) << '\n';
}

}  // namespace sscosamp
