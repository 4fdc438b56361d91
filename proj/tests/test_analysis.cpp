#include "sscosamp/analysis.hpp"

#include "sscosamp/linalg.hpp"
#include "sscosamp/recovery.hpp"
#include "test_support.hpp"

#include <Eigen/SVD>
#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace sscosamp;
using namespace sscosamp::testing;

namespace {

// Closed forms evaluated in long double as an independent reference.
long double c1_ref(long double d, long double e1, long double e2) {
  return ((2 + e1) * d + e1) * (2 + e2) * std::sqrt((1 + d) / (1 - d));
}
long double c2_ref(long double d, long double e1, long double e2) {
  return (2 + e2) * ((2 + e1) * (1 + d) + 2) / std::sqrt(1 - d);
}

}  // namespace

TEST_CASE("snr") {
  const Vector x = random_vector(16, 1);
  CHECK(std::isinf(snr_db(x, x)));
  CHECK(snr_db(x, x) > 0);
  Vector e = random_vector(16, 2);
  e *= 1e-5 * x.norm() / e.norm();
  CHECK(snr_db(x, x + e) == doctest::Approx(100).epsilon(1e-12));
  CHECK(snr_db(x, Vector::Zero(16)) == doctest::Approx(0).epsilon(1e-14));
  const Complex phase = std::polar(1.0, 0.7);
  const Vector est = x + e;
  CHECK(snr_db(Vector(phase * x), Vector(phase * est)) ==
        doctest::Approx(snr_db(x, est)).epsilon(1e-9));
  CHECK_THROWS_AS(snr_db(Vector::Zero(4), Vector::Ones(4)), InvalidInput);
  CHECK_THROWS_AS(snr_db(x, Vector::Zero(3)), InvalidInput);
}

TEST_CASE("theorem constants") {
  const auto c = theorem1_constants(0.029, 0.1, 1);
  CHECK(c.c1 <= 0.5);
  CHECK(c.c2 <= 12.7);
  CHECK(c.contracts());
  CHECK(static_cast<long double>(c.c1) == doctest::Approx(static_cast<double>(c1_ref(0.029L, 0.1L, 1))).epsilon(1e-12));
  CHECK(static_cast<long double>(c.c2) == doctest::Approx(static_cast<double>(c2_ref(0.029L, 0.1L, 1))).epsilon(1e-12));
  CHECK(c.c1 == doctest::Approx(0.496907).epsilon(1e-6));
  CHECK(c.c2 == doctest::Approx(12.6677).epsilon(1e-5));

  const auto zero = theorem1_constants(0, 0, 0);
  CHECK(zero.c1 == 0);
  CHECK(zero.c2 == 8);

  CHECK_THROWS_AS(theorem1_constants(1, 0, 0), InvalidInput);
  CHECK_THROWS_AS(theorem1_constants(-0.1, 0, 0), InvalidInput);
  CHECK_THROWS_AS(theorem1_constants(0.1, -1, 0), InvalidInput);
  CHECK_THROWS_AS(theorem1_constants(0.1, 0, -1), InvalidInput);
}

TEST_CASE("C1 increases in every argument") {
  const Real h = 1e-6;
  for (Real d : {0.0, 0.01, 0.1, 0.3, 0.6, 0.9}) {
    for (Real e1 : {0.0, 0.1, 1.0, 5.0}) {
      for (Real e2 : {0.0, 0.5, 1.0, 10.0}) {
        const Real c = theorem1_constants(d, e1, e2).c1;
        CHECK(theorem1_constants(d + h, e1, e2).c1 > c);
        CHECK(theorem1_constants(d, e1 + h, e2).c1 > c);
        // With delta = eps1 = 0 the constant is identically 0 in eps2.
        if (d > 0 || e1 > 0) CHECK(theorem1_constants(d, e1, e2 + h).c1 > c);
      }
    }
  }
}

TEST_CASE("envelope on an exact recovery trace") {
  const Index n = 10;
  const Dictionary dict(Matrix::Identity(n, n));
  const SensingMatrix a{RealMatrix::Identity(n, n), 0};
  const Vector x = synthesize(dict, draw_sparse_coefficients(n, 2, {}, 3));
  SSCoSaMPConfig cfg;
  cfg.k = 2;
  const auto t = sscosamp::sscosamp(a, dict, measure(a, x, 0, 0), cfg);
  const auto env = corollary1_envelope(t, x, 0);
  CHECK(env.holds);
  CHECK(env.advisory);
  REQUIRE(env.error.size() == t.iterations.size() + 1);
  CHECK(env.error[0] == doctest::Approx(x.norm()));
  CHECK(env.slack[0] == doctest::Approx(0).epsilon(1e-14));
  for (std::size_t l = 0; l < env.error.size(); ++l) {
    const Real bound = std::ldexp(x.norm(), -static_cast<int>(l));
    CHECK(env.error[l] <= bound + 1e-12);
  }
  CHECK_FALSE(corollary1_envelope(t, x, 0, true).advisory);
}

TEST_CASE("envelope initial step absorbs noise") {
  RecoveryTrace empty;
  const Vector x = random_vector(4, 9);
  const auto env = corollary1_envelope(empty, x, 0.5);
  REQUIRE(env.slack.size() == 1);
  CHECK(env.slack[0] == doctest::Approx(25.4 * 0.5));
  CHECK(env.holds);
}

TEST_CASE("envelope on a pure-noise instance") {
  const auto dict = build_overcomplete_dft(16, 2);
  const auto a = draw_gaussian_sensing(12, 16, 4);
  const Vector x = Vector::Zero(16);
  const auto y = measure(a, x, 0.1, 5);
  SSCoSaMPConfig cfg;
  cfg.k = 1;
  cfg.max_iters = 10;
  const auto t = sscosamp::sscosamp(a, dict, y, cfg);
  const auto env = corollary1_envelope(t, x, y.noise_norm);
  for (std::size_t l = 0; l < env.error.size(); ++l) {
    CHECK(env.error[l] == doctest::Approx((x - (l == 0 ? x : t.iterations[l - 1].estimate)).norm()));
    CHECK((env.slack[l] >= 0) == (env.error[l] <= 25.4 * 0.1));
  }
}

TEST_CASE("drip estimate") {
  const auto dict = build_overcomplete_dft(16, 4);
  const SensingMatrix id{RealMatrix::Identity(16, 16), 0};
  const auto iso = drip_estimate(id, dict, 3, 200, 1);
  CHECK(iso.delta_lower < 1e-12);
  CHECK(iso.used == 200);

  const SensingMatrix twice{RealMatrix(2 * RealMatrix::Identity(16, 16)), 0};
  const auto scaled = drip_estimate(twice, dict, 3, 50, 1);
  CHECK(scaled.delta_lower == doctest::Approx(3).epsilon(1e-12));
  CHECK_FALSE(scaled.valid_rip());

  const auto a = draw_gaussian_sensing(128, 256, 17);
  const auto big = drip_estimate(a, build_overcomplete_dft(256, 4), 8, 1000, 99);
  CHECK(big.delta_lower < 1);
  CHECK(big.delta_lower > 0);
  CHECK(big.used == 1000);
  MESSAGE("delta_8 lower bound (m=128, n=256, 4x DFT, seed 99): " << big.delta_lower);

  // Nested sampling: more trials never lower the estimate, and every
  // sample lies below the reported maximum.
  const auto small_a = draw_gaussian_sensing(20, 32, 2);
  const auto d32 = build_overcomplete_dft(32, 2);
  Real prev = 0;
  for (int trials : {10, 50, 200}) {
    const auto est = drip_estimate(small_a, d32, 4, trials, 5);
    CHECK(est.delta_lower >= prev);
    for (Real s : est.samples) CHECK(s <= est.delta_lower);
    prev = est.delta_lower;
  }
  const auto shorter = drip_estimate(small_a, d32, 4, 10, 5);
  const auto longer = drip_estimate(small_a, d32, 4, 50, 5);
  for (std::size_t i = 0; i < shorter.samples.size(); ++i)
    CHECK(shorter.samples[i] == longer.samples[i]);

  CHECK_THROWS_AS(drip_estimate(small_a, d32, 4, 0, 5), InvalidInput);
  CHECK_THROWS_AS(drip_estimate(small_a, d32, 65, 10, 5), InvalidInput);
}

TEST_CASE("exhaustive delta bounds the Monte-Carlo estimate") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dictionary dict(random_matrix(6, 9, seed));
    const auto a = draw_gaussian_sensing(5, 6, seed + 1);
    for (Index k = 1; k <= 3; ++k) {
      const Real exact = drip_exhaustive(a, dict, k);
      CHECK(drip_estimate(a, dict, k, 300, seed).delta_lower <= exact + 1e-10);
    }
  }
}

TEST_CASE("operator-norm consequence of the D-RIP") {
  // || P_B A^T A P_B - P_B || <= delta_|B| with B from the exact estimate.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng gen(seed);
    const Index n = 6, d = 6 + static_cast<Index>(gen() % 7);
    const Dictionary dict(random_matrix(n, d, derive_seed(seed, 1)));
    const auto a = draw_gaussian_sensing(5, n, derive_seed(seed, 2));
    const Matrix ata = (a.matrix.transpose() * a.matrix).cast<Complex>();
    for (Index size = 1; size <= 3; ++size) {
      const Real delta = drip_exhaustive(a, dict, size);
      for (int rep = 0; rep < 5; ++rep) {
        std::vector<Index> idx(static_cast<std::size_t>(d));
        std::iota(idx.begin(), idx.end(), Index{0});
        std::shuffle(idx.begin(), idx.end(), gen);
        idx.resize(static_cast<std::size_t>(size));
        const auto p = build_projector(dict.matrix(), SupportSet(idx));
        const Matrix pb = p.basis() * p.basis().adjoint();
        const Matrix diff = pb * ata * pb - pb;
        const Real norm = Eigen::JacobiSVD<Matrix>(diff).singularValues()(0);
        CHECK(norm <= delta + 1e-6);
      }
    }
  }
}

TEST_CASE("mismatch") {
  const Dictionary dict(random_unit_dictionary(6, 10, 3));
  const auto alpha = draw_sparse_coefficients(10, 2, {}, 4);
  const Vector x = synthesize(dict, alpha);
  const auto exact = mismatch(dict, x, 2);
  CHECK(exact.value <= 1e-10);
  CHECK(exact.minimizer.support == alpha.support);
  CHECK(exact.upper_bound);

  // x orthogonal to every column: the best fit is zero.
  Matrix cols = Matrix::Zero(4, 3);
  cols.topRows(3) = random_matrix(3, 3, 5);
  const Dictionary partial(cols);
  const Vector e4 = (Vector(4) << 0, 0, 0, Complex(0, 2)).finished();
  for (Index k = 1; k <= 3; ++k) {
    const auto r = mismatch(partial, e4, k);
    CHECK(r.value == doctest::Approx(2 + 2 / std::sqrt(static_cast<Real>(k))).epsilon(1e-12));
  }

  const auto greedy = mismatch(dict, x, 2, MismatchMode::Greedy);
  CHECK(greedy.mode == MismatchMode::Greedy);
  CHECK(greedy.value >= exact.value - 1e-12);

  const Dictionary wide(random_matrix(4, 40, 6));
  CHECK_THROWS_AS(mismatch(wide, random_vector(4, 7), 20), InstanceTooLarge);
  CHECK_NOTHROW(mismatch(wide, random_vector(4, 7), 20, MismatchMode::Greedy));
  CHECK(mismatch_objective((Vector(2) << 3, 4).finished(), 4) == doctest::Approx(5 + 3.5));
}

TEST_CASE("mismatch agrees with a local search on near-sparse signals") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dictionary dict(random_unit_dictionary(6, 9, seed));
    const auto alpha = draw_sparse_coefficients(9, 2, {}, seed + 1);
    const Vector x = synthesize(dict, alpha) + 1e-3 * random_vector(6, seed + 2);
    const auto rep = mismatch(dict, x, 2);

    // Coordinate search on the mixed objective over the reported support,
    // started from the least-squares coefficients.
    const Matrix ds = dict.columns(rep.minimizer.support);
    Vector c = rep.minimizer.values;
    Real best = mismatch_objective(x - ds * c, 2);
    for (Real step = 1e-3; step > 1e-9; step *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (Index j = 0; j < c.size(); ++j) {
          for (Complex dir : {Complex(1), Complex(-1), Complex(0, 1), Complex(0, -1)}) {
            Vector trial = c;
            trial(j) += step * dir;
            const Real v = mismatch_objective(x - ds * trial, 2);
            if (v < best) {
              best = v;
              c = trial;
              improved = true;
            }
          }
        }
      }
    }
    CHECK(best <= rep.value + 1e-15);
    CHECK(rep.value <= 1.1 * best);
  }
}

TEST_CASE("upper RIP tail inequality") {
  const auto a = draw_gaussian_sensing(20, 40, 8);
  const auto zero = upper_rip_tail_check(a, 3, Vector::Zero(40), 0.5);
  CHECK(zero.holds);
  CHECK(zero.lhs == 0);
  CHECK(zero.slack == 0);

  RealMatrix unit = a.matrix;
  unit.colwise().normalize();
  const SensingMatrix u{unit, 0};
  Vector e = Vector::Zero(40);
  e(5) = 1;
  const auto one = upper_rip_tail_check(u, 1, e, 0.2);
  CHECK(one.lhs == doctest::Approx(1).epsilon(1e-12));
  CHECK(one.rhs == doctest::Approx(2 * std::sqrt(1.2)).epsilon(1e-12));
  CHECK(one.holds);

  const SensingMatrix a2 = draw_gaussian_sensing(64, 128, 10);
  const Dictionary id(Matrix::Identity(128, 128));
  Real delta = drip_estimate(a2, id, 4, 2000, 11).delta_lower;
  int violations = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const Vector z = random_vector(128, derive_seed(12, s));
    auto check = upper_rip_tail_check(a2, 4, z, delta);
    if (!check.holds) {
      delta = drip_estimate(a2, id, 4, 20000, 13).delta_lower;
      check = upper_rip_tail_check(a2, 4, z, delta);
    }
    violations += !check.holds;
  }
  CHECK(violations == 0);
  CHECK_THROWS_AS(upper_rip_tail_check(a2, 0, Vector::Zero(128), 0.1), InvalidInput);
}
