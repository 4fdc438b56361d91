#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace sscosamp {

using Real = double;
using Complex = std::complex<double>;
using Index = Eigen::Index;

// Dense storage is Eigen's default column-major layout.
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<Complex>;
using Vector = VectorX<Complex>;
using RealMatrix = MatrixX<Real>;
using RealVector = VectorX<Real>;

/// Raised for violated preconditions (dimension mismatch, empty input, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative solver fails or an iterate becomes non-finite.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by exhaustive routines whose enumeration would exceed their cap.
class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sorted, duplicate-free set of zero-based column indices.
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::vector<Index> indices);
  SupportSet(std::initializer_list<Index> indices)
      : SupportSet(std::vector<Index>(indices)) {}

  const std::vector<Index>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(Index j) const;
  bool is_subset_of(const SupportSet& other) const;
  Index max_index() const { return indices_.empty() ? -1 : indices_.back(); }

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend SupportSet set_union(const SupportSet& a, const SupportSet& b);
  friend bool operator==(const SupportSet&, const SupportSet&) = default;

  /// Semicolon-joined list, as used in CSV output.
  std::string to_string() const;

 private:
  std::vector<Index> indices_;
};

SupportSet set_union(const SupportSet& a, const SupportSet& b);

/// Columns of `m` selected by `s`, in index order.
template <typename Derived>
MatrixX<typename Derived::Scalar> select_columns(
    const Eigen::MatrixBase<Derived>& m, const SupportSet& s) {
  MatrixX<typename Derived::Scalar> out(m.rows(), static_cast<Index>(s.size()));
  Index c = 0;
  for (Index j : s) out.col(c++) = m.col(j);
  return out;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace sscosamp
