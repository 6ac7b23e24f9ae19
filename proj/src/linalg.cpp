#include "isqp/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include "isqp/errors.hpp"

namespace isqp {

namespace {

constexpr double kPivotFloor = 1e-14;

#ifndef NDEBUG
void assert_residual(const Matrix& a, std::span<const double> x, std::span<const double> b) {
  const double scale = std::max(1.0, norm_inf(b));
  assert(residual_inf(a, x, b) <= 1e-10 * scale * std::max(1.0, a.norm_inf()));
  (void)scale;
}
#endif

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    assert(r.size() == cols_);
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (double v : row(i)) sum += std::abs(v);
    best = std::max(best, sum);
  }
  return best;
}

bool Matrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j) {
      const double a = (*this)(i, j);
      if (std::abs(a - (*this)(j, i)) > tol * std::max(1.0, std::abs(a))) return false;
    }
  return true;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  assert(a.cols() == b.rows());
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  assert(a.cols() == x.size());
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

Vector transpose_times(const Matrix& a, std::span<const double> x) {
  assert(a.rows() == x.size());
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) axpy(x[i], a.row(i), y);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double norm_inf(std::span<const double> v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector add(std::span<const double> a, std::span<const double> b) {
  Vector c(a.begin(), a.end());
  axpy(1.0, b, c);
  return c;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  Vector c(a.begin(), a.end());
  axpy(-1.0, b, c);
  return c;
}

Vector scaled(double alpha, std::span<const double> v) {
  Vector c(v.begin(), v.end());
  for (double& x : c) x *= alpha;
  return c;
}

double residual_inf(const Matrix& a, std::span<const double> x, std::span<const double> b) {
  const Vector ax = a * x;
  double r = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) r = std::max(r, std::abs(ax[i] - b[i]));
  return r;
}

LuFactorization::LuFactorization(const Matrix& a)
    : lu_(a), perm_(a.rows())
#ifndef NDEBUG
      ,
      original_(a)
#endif
{
  if (a.rows() != a.cols())
    throw SingularMatrix(fmt::format("LU of non-square {}x{} matrix", a.rows(), a.cols()));
  const std::size_t n = a.rows();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double floor = kPivotFloor * a.norm_inf();

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
    const double pivot = lu_(p, k);
    if (!(std::abs(pivot) > floor) || pivot == 0.0)
      throw SingularMatrix(fmt::format("pivot {:.3e} below floor {:.3e} at column {}", pivot,
                                       floor, k));
    if (p != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
      std::swap(perm_[k], perm_[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = lu_(i, k) / lu_(k, k);
      lu_(i, k) = factor;
      if (factor == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
    }
  }
}

Vector LuFactorization::solve(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  assert(b.size() == n);
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
#ifndef NDEBUG
  assert_residual(original_, x, b);
#endif
  return x;
}

Vector lu_solve(const Matrix& a, std::span<const double> b) {
  if (b.size() != a.rows())
    throw SingularMatrix(fmt::format("rhs length {} does not match {} rows", b.size(), a.rows()));
  return LuFactorization(a).solve(b);
}

Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols())
    throw NotPositiveDefinite(
        fmt::format("Cholesky of non-square {}x{} matrix", a.rows(), a.cols()));
  const std::size_t n = a.rows();
  const double floor = kPivotFloor * a.norm_inf();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > floor) || diag <= 0.0)
      throw NotPositiveDefinite(fmt::format("pivot {:.3e} at column {}", diag, j));
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

CholeskyFactorization::CholeskyFactorization(const Matrix& a) : l_(cholesky(a)) {}

Vector CholeskyFactorization::solve(std::span<const double> b) const {
  const std::size_t n = l_.rows();
  assert(b.size() == n);
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l_(i, k) * y[k];
    y[i] /= l_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= l_(k, i) * y[k];
    y[i] /= l_(i, i);
  }
  return y;
}

Vector spd_solve(const Matrix& m, std::span<const double> b) {
  Vector x = CholeskyFactorization(m).solve(b);
#ifndef NDEBUG
  assert_residual(m, x, b);
#endif
  return x;
}

Matrix spd_solve(const Matrix& m, const Matrix& b) {
  const CholeskyFactorization chol(m);
  Matrix x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    const Vector col = chol.solve(b.column(j));
    for (std::size_t i = 0; i < col.size(); ++i) x(i, j) = col[i];
  }
  return x;
}

}  // namespace isqp
