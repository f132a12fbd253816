#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace purelax {

using Vector = std::vector<double>;

/// Dense row-major matrix. Small by design: used for per-cell point sets,
/// simplex bases and the null-space steps of the reduction algorithms.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  /// Builds a matrix from nested rows; all rows must share one length.
  static Matrix from_rows(const std::vector<Vector>& rows);
  Vector row_vector(std::size_t r) const { auto s = row(r); return {s.begin(), s.end()}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double max_abs(std::span<const double> v) noexcept;
double max_abs_diff(std::span<const double> a, std::span<const double> b) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Returns a nonzero vector c with A c = 0, scaled to unit max-norm, or
/// nothing when the columns of A are linearly independent.
///
/// Gaussian elimination with partial pivoting; a column whose best remaining
/// pivot is below `rel_tol * max|A|` is treated as dependent. The first such
/// column (smallest index) seeds the null vector, so the result is
/// deterministic for a given input.
std::optional<Vector> null_vector(const Matrix& a, double rel_tol = 1e-12);

/// Inverse of a square matrix by LU with partial pivoting; nothing if a pivot
/// falls below `rel_tol * max|A|`.
std::optional<Matrix> invert(const Matrix& a, double rel_tol = 1e-12);

/// Solves A x = b for square A; nothing when A is numerically singular.
std::optional<Vector> solve_linear(const Matrix& a, std::span<const double> b,
                                   double rel_tol = 1e-12);

}  // namespace purelax
