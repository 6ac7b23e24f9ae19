#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace isqp {

using Vector = std::vector<double>;

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  Vector column(std::size_t j) const;

  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;

  /// Max absolute row sum.
  double norm_inf() const;

  bool is_symmetric(double tol = 1e-12) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

/// Aᵀx without forming the transpose.
Vector transpose_times(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(double alpha, std::span<const double> v);

/// LU factorization with partial pivoting, PA = LU.
class LuFactorization {
 public:
  explicit LuFactorization(const Matrix& a);

  std::size_t size() const noexcept { return lu_.rows(); }
  Vector solve(std::span<const double> b) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
#ifndef NDEBUG
  Matrix original_;
#endif
};

/// Solves Ax = b. Throws SingularMatrix when a pivot magnitude drops below
/// 1e-14·‖A‖∞.
Vector lu_solve(const Matrix& a, std::span<const double> b);

/// Lower-triangular L with LLᵀ = A. Throws NotPositiveDefinite when a
/// diagonal pivot is at or below 1e-14·‖A‖∞ (or non-positive).
Matrix cholesky(const Matrix& a);

class CholeskyFactorization {
 public:
  explicit CholeskyFactorization(const Matrix& a);

  const Matrix& lower() const noexcept { return l_; }
  Vector solve(std::span<const double> b) const;

 private:
  Matrix l_;
};

Vector spd_solve(const Matrix& m, std::span<const double> b);

/// Solves for every column of `b`.
Matrix spd_solve(const Matrix& m, const Matrix& b);

/// ‖Ax − b‖∞.
double residual_inf(const Matrix& a, std::span<const double> x, std::span<const double> b);

}  // namespace isqp
