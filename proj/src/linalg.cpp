#include "purelax/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "purelax/errors.hpp"

namespace purelax {

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw DimensionMismatch("ragged matrix rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

double max_abs(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) noexcept {
  double m = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::optional<Vector> null_vector(const Matrix& a, double rel_tol) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  if (cols == 0) return std::nullopt;
  Matrix m = a;
  const double threshold = rel_tol * std::max(max_abs(std::span<const double>(&m(0, 0), rows * cols)), 1e-300);

  // pivot_col[k] = column pivoted on row k
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  std::optional<std::size_t> free_col;
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t best = rank;
    double best_val = 0.0;
    for (std::size_t r = rank; r < rows; ++r) {
      if (std::abs(m(r, c)) > best_val) {
        best_val = std::abs(m(r, c));
        best = r;
      }
    }
    if (rank >= rows || best_val <= threshold) {
      free_col = c;
      break;
    }
    if (best != rank) {
      for (std::size_t k = 0; k < cols; ++k) std::swap(m(best, k), m(rank, k));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || m(r, c) == 0.0) continue;
      const double f = m(r, c) / m(rank, c);
      for (std::size_t k = c; k < cols; ++k) m(r, k) -= f * m(rank, k);
      m(r, c) = 0.0;
    }
    pivot_col.push_back(c);
    ++rank;
  }
  if (!free_col) return std::nullopt;

  // Reduced form: for each pivot row k, m(k,pc) x_pc + m(k,free) x_free = 0
  // (other columns beyond the free one are set to zero).
  Vector x(cols, 0.0);
  const std::size_t f = *free_col;
  x[f] = 1.0;
  for (std::size_t k = 0; k < rank; ++k) {
    const std::size_t pc = pivot_col[k];
    x[pc] = -m(k, f) / m(k, pc);
  }
  const double scale = max_abs(x);
  for (double& v : x) v /= scale;
  return x;
}

namespace {

struct Lu {
  Matrix lu;
  std::vector<std::size_t> perm;
};

std::optional<Lu> lu_factor(const Matrix& a, double rel_tol) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionMismatch("LU of a non-square matrix");
  Lu f{a, std::vector<std::size_t>(n)};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  if (n == 0) return f;
  const double threshold = rel_tol * std::max(max_abs(std::span<const double>(&f.lu(0, 0), n * n)), 1e-300);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(f.lu(r, c)) > std::abs(f.lu(best, c))) best = r;
    if (std::abs(f.lu(best, c)) <= threshold) return std::nullopt;
    if (best != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(f.lu(best, k), f.lu(c, k));
      std::swap(f.perm[best], f.perm[c]);
    }
    const double pivot = f.lu(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double l = f.lu(r, c) / pivot;
      f.lu(r, c) = l;
      if (l == 0.0) continue;
      for (std::size_t k = c + 1; k < n; ++k) f.lu(r, k) -= l * f.lu(c, k);
    }
  }
  return f;
}

Vector lu_solve(const Lu& f, std::span<const double> b) {
  const std::size_t n = f.lu.rows();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[f.perm[i]];
    for (std::size_t k = 0; k < i; ++k) s -= f.lu(i, k) * x[k];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= f.lu(i, k) * x[k];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

}  // namespace

std::optional<Matrix> invert(const Matrix& a, double rel_tol) {
  auto f = lu_factor(a, rel_tol);
  if (!f) return std::nullopt;
  const std::size_t n = a.rows();
  Matrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    const Vector col = lu_solve(*f, e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    e[c] = 0.0;
  }
  return inv;
}

std::optional<Vector> solve_linear(const Matrix& a, std::span<const double> b, double rel_tol) {
  if (b.size() != a.rows()) throw DimensionMismatch("right-hand side length");
  auto f = lu_factor(a, rel_tol);
  if (!f) return std::nullopt;
  return lu_solve(*f, b);
}

}  // namespace purelax
