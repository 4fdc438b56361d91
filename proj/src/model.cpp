#include "sscosamp/model.hpp"

#include "sscosamp/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sscosamp {

Dictionary::Dictionary(Matrix matrix, DictionaryKind kind)
    : matrix_(std::move(matrix)), kind_(kind) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1)
    throw InvalidInput("Dictionary: empty matrix");
  if (!matrix_.allFinite()) throw InvalidInput("Dictionary: non-finite entries");
  column_norms_ = matrix_.colwise().norm().transpose();
  if ((column_norms_.array() == 0).any()) throw InvalidInput("Dictionary: zero column");
}

Matrix Dictionary::columns(const SupportSet& s) const {
  if (s.max_index() >= d()) throw InvalidInput("Dictionary: support index out of range");
  return select_columns(matrix_, s);
}

const Matrix& Dictionary::frame_gram_pinv() const {
  std::call_once(cache_->once, [this] {
    cache_->gram_pinv = hermitian_pinv(matrix_ * matrix_.adjoint());
  });
  return cache_->gram_pinv;
}

Matrix hermitian_pinv(const Matrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
  const RealVector& ev = eig.eigenvalues();
  const Real floor = ev.size() ? 1e-12 * ev.cwiseAbs().maxCoeff() : 0;
  RealVector inv(ev.size());
  for (Index i = 0; i < ev.size(); ++i) inv(i) = ev(i) > floor ? 1.0 / ev(i) : 0.0;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().adjoint();
}

Dictionary build_overcomplete_dft(Index n, Index redundancy) {
  if (n < 2 || redundancy < 1) throw InvalidInput("build_overcomplete_dft: need n >= 2, redundancy >= 1");
  if (redundancy > std::numeric_limits<Index>::max() / n)
    throw InvalidInput("build_overcomplete_dft: d overflows");
  const Index d = redundancy * n;
  const Real scale = 1.0 / std::sqrt(static_cast<Real>(n));
  Matrix m(n, d);
  for (Index j = 0; j < d; ++j) {
    for (Index t = 0; t < n; ++t) {
      // Reduce t*j mod d first so the phase stays exact for large indices.
      const Index p = (t * j) % d;
      const Real phase = 2 * std::numbers::pi * static_cast<Real>(p) / static_cast<Real>(d);
      m(t, j) = std::polar(scale, phase);
    }
  }
  return Dictionary(std::move(m), DictionaryKind::OvercompleteDft);
}

Dictionary build_rescaled_identity(Index n, Real scale) {
  if (n < 2 || n % 2 != 0) throw InvalidInput("build_rescaled_identity: n must be even");
  if (!(scale > 0)) throw InvalidInput("build_rescaled_identity: scale must be positive");
  Matrix m = Matrix::Identity(n, n);
  for (Index i = 0; i < n / 2; ++i) m(i, i) = scale;
  return Dictionary(std::move(m), DictionaryKind::RescaledIdentity);
}

Vector SparseCoefficients::dense() const {
  Vector out = Vector::Zero(ambient_dim);
  Index c = 0;
  for (Index j : support) out(j) = values(c++);
  return out;
}

namespace {

// k distinct sorted values from [0, range).
std::vector<Index> choose_sorted(Index range, Index k, Rng& gen) {
  std::vector<Index> pool(static_cast<std::size_t>(range));
  for (Index i = 0; i < range; ++i) pool[i] = i;
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, range - 1);
    std::swap(pool[i], pool[pick(gen)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Places contiguous units of the given widths so that at least `gap` zeros
// separate neighbours (and the wrap, when cyclic). Compressed-slot sampling:
// choose unit starts in a shortened range, then re-insert the spacing.
std::vector<Index> place_units(Index d, std::vector<Index> widths, Index gap, bool cyclic,
                               Rng& gen) {
  const auto u = static_cast<Index>(widths.size());
  Index extra = 0;
  for (Index w : widths) extra += w - 1;
  const Index spacers = (cyclic ? u : u - 1) * gap;
  const Index range = d - extra - spacers;
  if (range < u) throw InvalidInput("draw_sparse_coefficients: pattern infeasible for d");

  const std::vector<Index> slots = choose_sorted(range, u, gen);
  std::vector<Index> out;
  Index shift = 0;
  for (Index i = 0; i < u; ++i) {
    const Index start = slots[i] + shift;
    for (Index w = 0; w < widths[i]; ++w) out.push_back(start + w);
    shift += widths[i] - 1 + gap;
  }
  if (cyclic) {
    std::uniform_int_distribution<Index> rot(0, d - 1);
    const Index offset = rot(gen);
    for (Index& j : out) j = (j + offset) % d;
  }
  return out;
}

}  // namespace

SparseCoefficients draw_sparse_coefficients(Index d, Index k, const SparsityPattern& pattern,
                                            std::uint64_t seed, bool real_values) {
  if (d < 1 || k < 0 || k > d) throw InvalidInput("draw_sparse_coefficients: need 0 <= k <= d");
  if (pattern.min_gap < 0) throw InvalidInput("draw_sparse_coefficients: negative gap");
  Rng gen(seed);

  std::vector<Index> idx;
  if (k > 0) {
    switch (pattern.kind) {
      case PatternKind::UniformRandom:
        idx = choose_sorted(d, k, gen);
        break;
      case PatternKind::WellSeparated:
        if (k * (pattern.min_gap + 1) > d)
          throw InvalidInput("draw_sparse_coefficients: k (min_gap + 1) > d");
        idx = place_units(d, std::vector<Index>(static_cast<std::size_t>(k), 1),
                          pattern.min_gap, pattern.cyclic, gen);
        break;
      case PatternKind::ClusteredBlock:
        idx = place_units(d, {k}, 0, false, gen);
        break;
      case PatternKind::Hybrid: {
        const Index separated = k / 2;
        std::vector<Index> widths(static_cast<std::size_t>(separated), 1);
        std::uniform_int_distribution<Index> where(0, separated);
        widths.insert(widths.begin() + where(gen), k - separated);
        idx = place_units(d, std::move(widths), pattern.min_gap, pattern.cyclic, gen);
        break;
      }
    }
  }

  SparseCoefficients out;
  out.support = SupportSet(std::move(idx));
  out.ambient_dim = d;
  if (real_values) {
    out.values = real_normal_vector(k, gen).cast<Complex>();
  } else {
    out.values = complex_normal_vector(k, gen);
  }
  return out;
}

Vector synthesize(const Dictionary& dict, const SparseCoefficients& coeffs) {
  if (coeffs.ambient_dim != dict.d()) throw InvalidInput("synthesize: ambient dimension mismatch");
  if (static_cast<Index>(coeffs.support.size()) != coeffs.values.size())
    throw InvalidInput("synthesize: support/values size mismatch");
  Vector x = Vector::Zero(dict.n());
  Index c = 0;
  for (Index j : coeffs.support) x += coeffs.values(c++) * dict.matrix().col(j);
  return x;
}

SensingMatrix draw_gaussian_sensing(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || m > n) throw InvalidInput("draw_gaussian_sensing: need 1 <= m <= n");
  Rng gen(seed);
  std::normal_distribution<Real> normal(0.0, 1.0 / std::sqrt(static_cast<Real>(m)));
  SensingMatrix a{RealMatrix(m, n), seed};
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) a.matrix(i, j) = normal(gen);
  return a;
}

Measurements measure(const SensingMatrix& a, const Vector& x, Real noise_norm,
                     std::uint64_t seed) {
  if (x.size() != a.n()) throw InvalidInput("measure: x length != n");
  if (!(noise_norm >= 0)) throw InvalidInput("measure: noise_norm must be >= 0");
  Measurements out;
  out.y = a.matrix * x;
  if (noise_norm > 0) {
    Rng gen(seed);
    Vector e = complex_normal_vector(a.m(), gen);
    e *= noise_norm / e.norm();
    out.y += e;
    out.noise_norm = e.norm();
  }
  return out;
}

namespace {

void put(std::ostream& os, Real v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  os << s.str();
}

}  // namespace

void write_matrix(std::ostream& os, const Matrix& m, bool as_complex) {
  os << m.rows() << ',' << m.cols() << ',' << (as_complex ? 1 : 0) << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      put(os, m(i, j).real());
      if (as_complex) {
        os << ',';
        put(os, m(i, j).imag());
      }
    }
    os << '\n';
  }
}

void write_matrix(std::ostream& os, const RealMatrix& m) {
  write_matrix(os, Matrix(m.cast<Complex>()), false);
}

Matrix read_matrix(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("read_matrix: missing header");
  Index rows = 0, cols = 0;
  int cplx = 0;
  char c1 = 0, c2 = 0;
  std::istringstream hs(line);
  if (!(hs >> rows >> c1 >> cols >> c2 >> cplx) || c1 != ',' || c2 != ',' || rows < 0 ||
      cols < 0 || (cplx != 0 && cplx != 1))
    throw InvalidInput("read_matrix: malformed header");

  Matrix m(rows, cols);
  const Index per_row = cols * (cplx ? 2 : 1);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) throw InvalidInput("read_matrix: truncated data");
    std::istringstream ls(line);
    std::vector<Real> vals;
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidInput("read_matrix: bad number '" + cell + "'");
      }
    }
    if (static_cast<Index>(vals.size()) != per_row)
      throw InvalidInput("read_matrix: wrong entry count in row " + std::to_string(i));
    for (Index j = 0; j < cols; ++j)
      m(i, j) = cplx ? Complex(vals[2 * j], vals[2 * j + 1]) : Complex(vals[j], 0);
  }
  if (!m.allFinite()) throw InvalidInput("read_matrix: non-finite entries");
  return m;
}

}  // namespace sscosamp
