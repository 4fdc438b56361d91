// Runs the command-line tool as a subprocess.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(SSCOSAMP_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "sscosamp_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("constants") {
  const auto r = run("constants --delta 0.029 --eps1 0.1 --eps2 1");
  CHECK(r.code == 0);
  CHECK(r.out == "delta4k,eps1,eps2,C1,C2,contracts\n0.029,0.1,1,0.4969072934670217,12.66773349803914,1\n");
  CHECK(run("constants --delta 1.5 --eps1 0 --eps2 0").code == 2);
  CHECK(run("constants --delta 0.1 --eps1 0 --eps2 0 --format json").out.find("\"C1\"") != std::string::npos);
}

TEST_CASE("usage and config errors exit with 2") {
  CHECK(run("sweep --config missing.cfg").code == 2);
  CHECK(run("sweep").code == 2);
  CHECK(run("--bogus").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("recover --no-such-flag").code == 2);
  CHECK(run("constants --delta 0.1 --format xml").code == 2);

  const auto bad = scratch("bad.cfg");
  write_file(bad, "scenario = dft-separated\nm_grid = 8\nunknown_key = 1\n");
  CHECK(run("sweep --config " + bad.string()).code == 2);
}

TEST_CASE("numerical failure exits with 3") {
  const auto cfg = scratch("l1fail.cfg");
  write_file(cfg, "algorithm = l1\nl1_max_iters = 1\nl1_tol = 1e-15\n");
  CHECK(run("recover --config " + cfg.string()).code == 3);
  write_file(cfg, "algorithm = l1\nl1_max_iters = 0\n");
  CHECK(run("recover --config " + cfg.string()).code == 2);
}

TEST_CASE("recover is deterministic") {
  const auto a = run("recover --seed 7");
  const auto b = run("recover --seed 7");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("iter,residual_norm,error_to_truth,support\n", 0) == 0);
  CHECK(run("recover --seed 8").out != a.out);
}

TEST_CASE("every subcommand reproduces its CSV byte for byte") {
  const auto cfg = scratch("sweep.cfg");
  write_file(cfg,
             "scenario = dft-separated\nn = 32\nredundancy = 4\nk = 2\nm_grid = 12, 24\n"
             "trials_per_point = 1\nalgorithms = sscosamp-omp, omp, cosamp, l1\nseed = 5\n");
  for (const std::string cmd :
       {"sweep --config " + cfg.string(), "sweep --config " + cfg.string() + " --threads 2",
        std::string("project-eval --seed 3"), std::string("drip --seed 4"),
        std::string("recover --seed 7"), std::string("constants --delta 0.2 --eps1 0.1 --eps2 1")}) {
    CAPTURE(cmd);
    const auto p1 = scratch("one.csv"), p2 = scratch("two.csv");
    REQUIRE(run(cmd + " --out " + p1.string()).code == 0);
    REQUIRE(run(cmd + " --out " + p2.string()).code == 0);
    const std::string first = slurp(p1);
    CHECK(!first.empty());
    CHECK(first == slurp(p2));
  }
}

TEST_CASE("sweep writes rows and summary") {
  const auto cfg = scratch("sweep2.cfg");
  write_file(cfg,
             "scenario = rescaled-identity\nn = 32\nk = 2\nm_grid = 16\ntrials_per_point = 2\n"
             "algorithms = sscosamp-threshold\n");
  const auto rows = scratch("rows.csv"), summary = scratch("summary.csv");
  REQUIRE(run("sweep --config " + cfg.string() + " --out " + rows.string() + " --summary " +
              summary.string())
              .code == 0);
  CHECK(slurp(rows).rfind("scenario,algorithm,m,trial,seed,snr_db,success,iterations,wall_ms,stop_reason\n", 0) == 0);
  CHECK(slurp(summary).find("sscosamp-threshold,16,2,") != std::string::npos);
  const auto json = run("sweep --config " + cfg.string() + " --format json");
  CHECK(json.code == 0);
  CHECK(json.out.find("\"summary\"") != std::string::npos);
}
