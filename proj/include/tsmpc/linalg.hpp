#pragma once

#include <cstddef>
#include <vector>

namespace tsmpc::linalg {

using Vector = std::vector<double>;

// Dense row-major matrix. Sized for the problems at hand (tens of rows),
// hot loops route through the kernels layer.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(const Vector& x, const Vector& y);
void axpy(double alpha, const Vector& x, Vector& y);  // y += alpha*x
Vector matvec(const Matrix& a, const Vector& x);      // A x
Vector matvec_t(const Matrix& a, const Vector& x);    // A^T x

Vector add(Vector x, const Vector& y);
Vector sub(Vector x, const Vector& y);
Vector scaled(Vector x, double alpha);
double inf_norm(const Vector& x);
double two_norm(const Vector& x);

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
double quad_form(const Matrix& h, const Vector& u);  // u^T H u

bool is_symmetric(const Matrix& a, double tol);
double max_abs_diag(const Matrix& a);

// Cholesky factorization A = L L^T for symmetric positive definite A.
// factor() returns false when a pivot falls below the relative tolerance,
// which doubles as the rank test for Schur complements of active-set rows.
class Cholesky {
 public:
  Cholesky() = default;

  bool factor(const Matrix& a, double rel_pivot_tol = 1e-13);

  bool valid() const { return valid_; }
  std::size_t size() const { return l_.rows(); }
  const Matrix& l() const { return l_; }
  double min_pivot() const { return min_pivot_; }

  void solve_in_place(Vector& b) const;
  Vector solve(Vector b) const;

 private:
  Matrix l_;
  bool valid_ = false;
  double min_pivot_ = 0.0;
};

}  // namespace tsmpc::linalg
