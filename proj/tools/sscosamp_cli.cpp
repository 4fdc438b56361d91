// sscosamp: benchmark and diagnostics front end.
//
//   sscosamp sweep        --config sweep.cfg [--seed S] [--out rows.csv] [--summary agg.csv]
//   sscosamp project-eval [--config study.cfg] [--seed S] [--out eps.csv]
//   sscosamp drip         [--config drip.cfg] [--seed S]
//   sscosamp recover      [--config recover.cfg] [--seed S]
//   sscosamp constants    --delta 0.029 --eps1 0.1 --eps2 1
//
// Exit codes: 0 success, 2 usage/config error, 3 numerical failure.

#include "sscosamp/analysis.hpp"
#include "sscosamp/bench.hpp"
#include "sscosamp/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace sscosamp;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Key-value configuration file");
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", o.out, "Output path (default: stdout)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

KeyValueConfig load_config(const CommonOptions& o) {
  KeyValueConfig kv = o.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config);
  if (o.seed) kv.set("seed", std::to_string(*o.seed));
  return kv;
}

// Writes to --out when given, else stdout.
template <typename Fn>
void emit(const CommonOptions& o, Fn&& write) {
  if (o.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InvalidInput("cannot open output file '" + o.out + "'");
  write(f);
}

int run_sweep_cmd(const CommonOptions& o, const std::string& summary_path, int threads,
                  bool timing) {
  if (o.config.empty()) throw InvalidInput("sweep: --config is required");
  KeyValueConfig kv = load_config(o);
  SweepConfig cfg = SweepConfig::from_config(kv);
  if (threads > 0) cfg.threads = threads;
  cfg.measure_time = timing;
  const SweepResult result = run_sweep(cfg);
  emit(o, [&](std::ostream& os) {
    if (o.format == "json") write_sweep_json(os, result);
    else write_sweep_csv(os, result);
  });
  if (!summary_path.empty()) {
    std::ofstream f(summary_path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open summary file '" + summary_path + "'");
    write_summary_csv(f, result);
  } else if (!o.out.empty()) {
    write_summary_csv(std::cerr, result);
  }
  return 0;
}

int run_project_cmd(const CommonOptions& o) {
  const auto cfg = ProjectionStudyConfig::from_config(load_config(o));
  const auto rows = run_projection_study(cfg);
  emit(o, [&](std::ostream& os) {
    if (o.format == "json") write_projection_json(os, rows);
    else write_projection_csv(os, rows);
  });
  return 0;
}

Dictionary dictionary_from(const KeyValueConfig& kv, Index n) {
  const std::string kind = kv.get_string("dictionary", "dft");
  if (kind == "dft") return build_overcomplete_dft(n, kv.get_int("redundancy", 4));
  if (kind == "rescaled-identity") return build_rescaled_identity(n, kv.get_real("rescale", 100));
  if (kind == "identity") return build_rescaled_identity(n, 1);
  throw InvalidInput("unknown dictionary '" + kind + "'");
}

int run_drip_cmd(const CommonOptions& o) {
  const KeyValueConfig kv = load_config(o);
  const Index n = kv.get_int("n", 256);
  const Index m = kv.get_int("m", 128);
  const Index k = kv.get_int("k", 8);
  const int trials = static_cast<int>(kv.get_int("trials", 1000));
  const std::uint64_t seed = kv.get_u64("seed", 0);
  const Dictionary dict = dictionary_from(kv, n);
  kv.require_all_used();

  const SensingMatrix a = draw_gaussian_sensing(m, n, derive_seed(seed, 1));
  const DRipEstimate est = drip_estimate(a, dict, k, trials, derive_seed(seed, 2));
  emit(o, [&](std::ostream& os) {
    if (o.format == "json") {
      nlohmann::json j = {{"n", n}, {"m", m}, {"d", dict.d()}, {"k", k},
                          {"trials", est.trials}, {"used", est.used}, {"seed", seed},
                          {"delta_lower", est.delta_lower}, {"valid_rip", est.valid_rip()},
                          {"floor", 1e-12}};
      os << j.dump(2) << '\n';
    } else {
      os << "n,m,d,k,trials,used,seed,delta_lower,valid_rip,floor\n"
         << n << ',' << m << ',' << dict.d() << ',' << k << ',' << est.trials << ','
         << est.used << ',' << seed << ',' << format_real(est.delta_lower) << ','
         << (est.valid_rip() ? 1 : 0) << ",1e-12\n";
    }
  });
  return 0;
}

int run_recover_cmd(const CommonOptions& o) {
  KeyValueConfig kv = load_config(o);
  // Defaults describe a small 4x overcomplete DFT instance.
  SweepConfig cfg;
  cfg.scenario = parse_scenario(kv.get_string("scenario", "dft-separated"));
  cfg.n = kv.get_int("n", 32);
  cfg.redundancy = kv.get_int("redundancy", 4);
  cfg.k = kv.get_int("k", 2);
  cfg.min_gap = kv.get_int("min_gap", 8);
  cfg.noise_norm = kv.get_real("noise_norm", 0);
  cfg.norm_bound_factor = kv.get_real("norm_bound_factor", 10);
  cfg.max_iters = static_cast<int>(kv.get_int("max_iters", 0));
  cfg.rescale = kv.get_real("rescale", 100);
  cfg.l1_max_iters = static_cast<int>(kv.get_int("l1_max_iters", cfg.l1_max_iters));
  cfg.l1_tol = kv.get_real("l1_tol", cfg.l1_tol);
  const Index m = kv.get_int("m", 24);
  const AlgorithmSpec alg = AlgorithmSpec::parse(kv.get_string("algorithm", "sscosamp-omp"));
  cfg.master_seed = kv.get_u64("seed", 0);
  cfg.m_grid = {m};
  cfg.algorithms = {alg};
  kv.require_all_used();
  cfg.validate();

  const Dictionary dict = scenario_dictionary(cfg);
  const std::uint64_t seed = trial_seed(cfg.master_seed, cfg.scenario, m, 0);
  const Instance inst = draw_instance(cfg, dict, m, seed);
  const RecoveryTrace trace = run_algorithm(alg, cfg, inst);
  const Real snr = snr_db(inst.x, trace.estimate);
  emit(o, [&](std::ostream& os) {
    if (o.format == "json") {
      nlohmann::json iters = nlohmann::json::array();
      for (const auto& rec : trace.iterations)
        iters.push_back({{"residual_norm", rec.residual_norm},
                         {"error_to_truth", (inst.x - rec.estimate).norm()},
                         {"support", rec.pruned.indices()}});
      nlohmann::json j = {{"algorithm", alg.name()}, {"seed", seed},
                          {"true_support", inst.alpha.support.indices()},
                          {"snr_db", format_real(snr)},
                          {"stop_reason", to_string(trace.stop_reason)},
                          {"iterations", iters}};
      os << j.dump(2) << '\n';
    } else {
      write_trace_csv(os, trace, inst.x);
    }
  });
  std::cerr << alg.name() << ": snr_db=" << format_real(snr)
            << " iterations=" << trace.iterations_run()
            << " stop=" << to_string(trace.stop_reason) << '\n';
  return 0;
}

int run_constants_cmd(const CommonOptions& o, Real delta, Real eps1, Real eps2) {
  const TheoremConstants t = theorem1_constants(delta, eps1, eps2);
  emit(o, [&](std::ostream& os) {
    if (o.format == "json") {
      nlohmann::json j = {{"delta4k", delta}, {"eps1", eps1}, {"eps2", eps2},
                          {"C1", t.c1},       {"C2", t.c2},     {"contracts", t.contracts()}};
      os << j.dump(2) << '\n';
    } else {
      os << "delta4k,eps1,eps2,C1,C2,contracts\n"
         << format_real(delta) << ',' << format_real(eps1) << ',' << format_real(eps2) << ','
         << format_real(t.c1) << ',' << format_real(t.c2) << ',' << (t.contracts() ? 1 : 0)
         << '\n';
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signal Space CoSaMP benchmarks and diagnostics"};
  app.require_subcommand(1);

  CommonOptions sweep_o, proj_o, drip_o, rec_o, const_o;
  std::string summary_path;
  int threads = 0;
  bool timing = false;
  Real delta = 0.029, eps1 = 0.1, eps2 = 1;

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo success-rate sweep over m");
  add_common(sweep, sweep_o);
  sweep->add_option("--summary", summary_path, "Write per-(algorithm, m) aggregates here");
  sweep->add_option("--threads", threads, "Worker threads (overrides the config)");
  sweep->add_flag("--timing", timing, "Record wall-clock time (output no longer reproducible)");

  auto* proj = app.add_subcommand("project-eval", "Effective (eps1, eps2) of projection backends");
  add_common(proj, proj_o);

  auto* drip = app.add_subcommand("drip", "Monte-Carlo D-RIP lower bound");
  add_common(drip, drip_o);

  auto* rec = app.add_subcommand("recover", "Run one instance and print its iteration trace");
  add_common(rec, rec_o);

  auto* cst = app.add_subcommand("constants", "Evaluate the iteration constants C1 and C2");
  add_common(cst, const_o);
  cst->add_option("--delta", delta, "Isometry constant delta_4k");
  cst->add_option("--eps1", eps1, "Projection parameter eps1");
  cst->add_option("--eps2", eps2, "Projection parameter eps2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sweep) return run_sweep_cmd(sweep_o, summary_path, threads, timing);
    if (*proj) return run_project_cmd(proj_o);
    if (*drip) return run_drip_cmd(drip_o);
    if (*rec) return run_recover_cmd(rec_o);
    if (*cst) return run_constants_cmd(const_o, delta, eps1, eps2);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InstanceTooLarge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
