#include "sscosamp/model.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <numbers>
#include <sstream>

using namespace sscosamp;
using namespace sscosamp::testing;

TEST_CASE("unitary DFT") {
  for (Index n : {2, 3, 8, 16}) {
    const auto d = build_overcomplete_dft(n, 1);
    CHECK(d.kind() == DictionaryKind::OvercompleteDft);
    const Matrix g = d.matrix().adjoint() * d.matrix();
    CHECK((g - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("DFT entries follow the defining formula") {
  const Index n = 6, r = 3, dd = n * r;
  const auto d = build_overcomplete_dft(n, r);
  REQUIRE(d.d() == dd);
  for (Index j = 0; j < dd; ++j) {
    CHECK(std::abs(d.column_norms()(j) - 1) < 1e-12);
    for (Index t = 0; t < n; ++t) {
      const Real phase = 2 * std::numbers::pi * static_cast<Real>(t * j) / static_cast<Real>(dd);
      const Complex expected = std::polar(1.0, phase) / std::sqrt(static_cast<Real>(n));
      CHECK(std::abs(d.matrix()(t, j) - expected) < 1e-12);
    }
  }
}

TEST_CASE("2x redundant DFT adjacent-column coherence") {
  const Index n = 256;
  const auto d = build_overcomplete_dft(n, 2);
  const Real oracle = 1 / (static_cast<Real>(n) * std::sin(std::numbers::pi / (2.0 * n)));
  for (Index i : {Index{0}, Index{17}, Index{300}, Index{510}}) {
    const Real coh = std::abs(d.matrix().col(i).dot(d.matrix().col(i + 1)));
    CHECK(coh > 0.63);
    CHECK(coh > 2 / std::numbers::pi);
    CHECK(std::abs(coh - oracle) < 1e-10);
  }
  CHECK(oracle == doctest::Approx(0.6366).epsilon(1e-4));
}

TEST_CASE("DFT validation") {
  CHECK_THROWS_AS(build_overcomplete_dft(1, 2), InvalidInput);
  CHECK_THROWS_AS(build_overcomplete_dft(4, 0), InvalidInput);
  CHECK_THROWS_AS(build_overcomplete_dft(Index{1} << 40, Index{1} << 40), InvalidInput);
}

TEST_CASE("rescaled identity") {
  const auto d = build_rescaled_identity(4, 100);
  CHECK(d.kind() == DictionaryKind::RescaledIdentity);
  RealMatrix expected = RealMatrix::Zero(4, 4);
  expected.diagonal() << 100, 100, 1, 1;
  CHECK((d.matrix() - expected.cast<Complex>()).norm() == 0);
  CHECK(d.column_norms()(0) == 100);
  CHECK(d.column_norms()(3) == 1);

  CHECK((build_rescaled_identity(2, 1).matrix() - Matrix::Identity(2, 2)).norm() == 0);

  const auto big = build_rescaled_identity(10, 7.5);
  for (Index j = 0; j < 10; ++j) CHECK(big.column_norms()(j) == (j < 5 ? 7.5 : 1.0));
  CHECK_THROWS_AS(build_rescaled_identity(3, 100), InvalidInput);
  CHECK_THROWS_AS(build_rescaled_identity(4, 0), InvalidInput);
}

TEST_CASE("dictionary validation and column norms") {
  Matrix m = random_matrix(5, 7, 3);
  const Dictionary d(m);
  for (Index j = 0; j < 7; ++j)
    CHECK(std::abs(d.column_norms()(j) - m.col(j).norm()) <= 1e-12 * m.col(j).norm());
  m.col(2).setZero();
  CHECK_THROWS_AS(Dictionary{m}, InvalidInput);
  CHECK_THROWS_AS(Dictionary{Matrix(0, 0)}, InvalidInput);
  Matrix bad = random_matrix(3, 3, 1);
  bad(1, 1) = Complex(std::numeric_limits<Real>::quiet_NaN(), 0);
  CHECK_THROWS_AS(Dictionary{bad}, InvalidInput);
}

TEST_CASE("full support is forced") {
  const auto c = draw_sparse_coefficients(10, 10, SparsityPattern::uniform(), 5);
  CHECK(c.support.size() == 10);
  for (Index j = 0; j < 10; ++j) CHECK(c.support.contains(j));
}

TEST_CASE("well separated supports keep the minimum gap") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (bool cyclic : {false, true}) {
      const Index d = 1024, k = 8, gap = 8;
      const auto c = draw_sparse_coefficients(d, k, SparsityPattern::well_separated(gap, cyclic), seed);
      REQUIRE(c.support.size() == static_cast<std::size_t>(k));
      const auto& idx = c.support.indices();
      for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i] - idx[i - 1] >= gap + 1);
      if (cyclic) CHECK(idx.front() + d - idx.back() >= gap + 1);
    }
  }
}

TEST_CASE("tight well separated packing") {
  // k (gap + 1) == d leaves exactly one arrangement up to rotation.
  const auto c = draw_sparse_coefficients(18, 3, SparsityPattern::well_separated(5, true), 11);
  const auto& idx = c.support.indices();
  CHECK(idx[1] - idx[0] == 6);
  CHECK(idx[2] - idx[1] == 6);
  CHECK_THROWS_AS(draw_sparse_coefficients(17, 3, SparsityPattern::well_separated(5), 1),
                  InvalidInput);
}

TEST_CASE("clustered supports form one block") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto c = draw_sparse_coefficients(1024, 8, SparsityPattern::clustered(), seed);
    const auto& idx = c.support.indices();
    REQUIRE(idx.size() == 8);
    CHECK(idx.back() - idx.front() == 7);
    CHECK(idx.back() < 1024);
  }
}

TEST_CASE("hybrid supports contain a block and separated singletons") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = draw_sparse_coefficients(1024, 8, SparsityPattern::hybrid(8), seed);
    const auto& idx = c.support.indices();
    REQUIRE(idx.size() == 8);
    int adjacent = 0;
    for (std::size_t i = 1; i < idx.size(); ++i) {
      const Index diff = idx[i] - idx[i - 1];
      CHECK((diff == 1 || diff >= 9));
      adjacent += diff == 1;
    }
    CHECK(adjacent == 3);
  }
}

TEST_CASE("coefficient draws are reproducible") {
  const auto p = SparsityPattern::well_separated(4);
  const auto a = draw_sparse_coefficients(200, 6, p, 77);
  const auto b = draw_sparse_coefficients(200, 6, p, 77);
  CHECK(a.support == b.support);
  CHECK(a.values == b.values);
  const auto c = draw_sparse_coefficients(200, 6, p, 78);
  CHECK(!(a.values == c.values));

  const auto r = draw_sparse_coefficients(50, 5, SparsityPattern::uniform(), 3, true);
  CHECK(r.values.imag().norm() == 0);
  CHECK_THROWS_AS(draw_sparse_coefficients(4, 5, SparsityPattern::uniform(), 1), InvalidInput);
  CHECK_THROWS_AS(draw_sparse_coefficients(4, -1, SparsityPattern::uniform(), 1), InvalidInput);
}

TEST_CASE("synthesize") {
  const Dictionary dict(random_matrix(6, 9, 1));
  SparseCoefficients empty{SupportSet{}, Vector(0), 9};
  CHECK(synthesize(dict, empty).norm() == 0);
  CHECK(synthesize(dict, empty).size() == 6);

  const Dictionary id(Matrix::Identity(3, 3));
  SparseCoefficients e2{SupportSet{1}, (Vector(1) << 5).finished(), 3};
  CHECK((synthesize(id, e2) - (Vector(3) << 0, 5, 0).finished()).norm() == 0);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = draw_sparse_coefficients(9, 4, SparsityPattern::uniform(), seed);
    Vector dense = Vector::Zero(9);
    for (std::size_t i = 0; i < c.support.size(); ++i)
      dense(c.support.indices()[i]) = c.values(static_cast<Index>(i));
    const Vector oracle = dict.matrix() * dense;
    CHECK((synthesize(dict, c) - oracle).cwiseAbs().maxCoeff() <= 1e-12 * (1 + oracle.norm()));
  }
  SparseCoefficients wrong{SupportSet{1}, (Vector(1) << 5).finished(), 4};
  CHECK_THROWS_AS(synthesize(id, wrong), InvalidInput);
}

TEST_CASE("gaussian sensing") {
  const auto a = draw_gaussian_sensing(4, 4, 123);
  const auto b = draw_gaussian_sensing(4, 4, 123);
  CHECK(a.matrix == b.matrix);

  const auto big = draw_gaussian_sensing(128, 256, 9);
  const Real count = 128.0 * 256.0;
  const Real sigma = 1 / std::sqrt(128.0);
  CHECK(std::abs(big.matrix.mean()) < 5 * sigma / std::sqrt(count));
  const Real mean_sq_col = big.matrix.colwise().squaredNorm().mean();
  CHECK(std::abs(mean_sq_col - 1) < 0.1);

  CHECK_THROWS_AS(draw_gaussian_sensing(0, 4, 1), InvalidInput);
  CHECK_THROWS_AS(draw_gaussian_sensing(5, 4, 1), InvalidInput);
}

TEST_CASE("measurement model") {
  const auto a = draw_gaussian_sensing(8, 16, 2);
  const Vector x = random_vector(16, 3);
  const auto clean = measure(a, x, 0, 4);
  CHECK((clean.y - a.matrix * x).norm() == 0);
  CHECK(clean.noise_norm == 0);

  const auto noise_only = measure(a, Vector::Zero(16), 1, 5);
  CHECK(std::abs(noise_only.y.norm() - 1) < 1e-12);

  for (Real level : {1e-6, 0.1, 3.0}) {
    const auto m = measure(a, x, level, 6);
    CHECK(std::abs(m.noise_norm - level) <= 1e-12 * level);
    CHECK(std::abs((m.y - a.matrix * x).norm() - level) <= 1e-12 * (1 + level));
  }
  CHECK_THROWS_AS(measure(a, Vector::Zero(15), 0, 1), InvalidInput);
  CHECK_THROWS_AS(measure(a, x, -1, 1), InvalidInput);
}

TEST_CASE("matrix text round trip") {
  const Matrix m = random_matrix(3, 4, 8);
  std::stringstream ss;
  write_matrix(ss, m);
  CHECK(ss.str().rfind("3,4,1\n", 0) == 0);
  CHECK(read_matrix(ss) == m);

  const RealMatrix r = random_real_matrix(2, 5, 9);
  std::stringstream rs;
  write_matrix(rs, r);
  CHECK(rs.str().rfind("2,5,0\n", 0) == 0);
  CHECK(read_matrix(rs).real() == r);

  std::stringstream bad("2,2,0\n1,2\n3\n");
  CHECK_THROWS_AS(read_matrix(bad), InvalidInput);
}

TEST_CASE("generated dictionaries are finite with no zero columns") {
  for (const auto& d : {build_overcomplete_dft(32, 4), build_rescaled_identity(32, 100)}) {
    CHECK(all_finite(d.matrix()));
    CHECK(d.column_norms().minCoeff() > 0);
  }
}
