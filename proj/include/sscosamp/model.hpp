#pragma once

// Signal model y = A x + e with x = D alpha: dictionaries, sparse
// coefficient draws, Gaussian sensing matrices and measurements.

#include "sscosamp/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>

namespace sscosamp {

enum class DictionaryKind { RescaledIdentity, OvercompleteDft, Custom };

/// n x d synthesis matrix. Columns must be nonzero and finite.
class Dictionary {
 public:
  explicit Dictionary(Matrix matrix, DictionaryKind kind = DictionaryKind::Custom);

  const Matrix& matrix() const { return matrix_; }
  DictionaryKind kind() const { return kind_; }
  const RealVector& column_norms() const { return column_norms_; }
  Index n() const { return matrix_.rows(); }
  Index d() const { return matrix_.cols(); }
  /// True when the dictionary's atoms wrap around (index d-1 adjacent to 0).
  bool cyclic() const { return kind_ == DictionaryKind::OvercompleteDft; }

  Matrix columns(const SupportSet& s) const;

  /// Pseudo-inverse of the frame operator D D^H, computed on first use and
  /// shared between copies.
  const Matrix& frame_gram_pinv() const;

 private:
  struct Cache {
    std::once_flag once;
    Matrix gram_pinv;
  };

  Matrix matrix_;
  DictionaryKind kind_;
  RealVector column_norms_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Pseudo-inverse of a Hermitian positive semidefinite matrix; eigenvalues
/// below 1e-12 of the largest are dropped.
Matrix hermitian_pinv(const Matrix& g);

/// Column j has entries exp(2 pi i t j / d) / sqrt(n), t = 0..n-1, d = redundancy * n.
Dictionary build_overcomplete_dft(Index n, Index redundancy);

/// Diagonal n x n dictionary; the first n/2 entries equal `scale`, the rest 1.
Dictionary build_rescaled_identity(Index n, Real scale);

struct SparseCoefficients {
  SupportSet support;
  Vector values;  // one per support index, in index order
  Index ambient_dim = 0;

  Vector dense() const;
};

enum class PatternKind { UniformRandom, WellSeparated, ClusteredBlock, Hybrid };

/// Support pattern. `min_gap` is the minimum number of zeros between
/// separated nonzeros; `cyclic` measures that spacing around the wrap
/// (index d-1 adjacent to index 0). Hybrid places floor(k/2) separated
/// singletons plus one block of the remaining entries, all units
/// separated by `min_gap`.
struct SparsityPattern {
  PatternKind kind = PatternKind::UniformRandom;
  Index min_gap = 0;
  bool cyclic = false;

  static SparsityPattern uniform() { return {}; }
  static SparsityPattern well_separated(Index gap, bool cyclic = false) {
    return {PatternKind::WellSeparated, gap, cyclic};
  }
  static SparsityPattern clustered() { return {PatternKind::ClusteredBlock, 0, false}; }
  static SparsityPattern hybrid(Index gap, bool cyclic = false) {
    return {PatternKind::Hybrid, gap, cyclic};
  }
};

/// Draws a k-sparse coefficient vector. Values are i.i.d. standard complex
/// Gaussian, or real standard Gaussian when `real_values` is set.
SparseCoefficients draw_sparse_coefficients(Index d, Index k, const SparsityPattern& pattern,
                                            std::uint64_t seed, bool real_values = false);

/// x = sum_j alpha_j D_j.
Vector synthesize(const Dictionary& dict, const SparseCoefficients& coeffs);

struct SensingMatrix {
  RealMatrix matrix;
  std::uint64_t seed = 0;

  Index m() const { return matrix.rows(); }
  Index n() const { return matrix.cols(); }
};

/// m x n matrix with i.i.d. N(0, 1/m) entries.
SensingMatrix draw_gaussian_sensing(Index m, Index n, std::uint64_t seed);

struct Measurements {
  Vector y;
  Real noise_norm = 0;  // ||e|| actually injected
};

/// y = A x + e with e a Gaussian direction rescaled to ||e|| = noise_norm.
Measurements measure(const SensingMatrix& a, const Vector& x, Real noise_norm,
                     std::uint64_t seed);

/// Text matrix format: a header line "rows,cols,complex" (complex is 0 or 1)
/// followed by one line per row. Complex rows interleave re,im per entry.
/// Values are printed with 17 significant digits so reads are exact.
void write_matrix(std::ostream& os, const Matrix& m, bool as_complex = true);
void write_matrix(std::ostream& os, const RealMatrix& m);
Matrix read_matrix(std::istream& is);

}  // namespace sscosamp
