#include "tsmpc/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "tsmpc/error.hpp"
#include "tsmpc/kernels.hpp"

namespace tsmpc::linalg {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(const Vector& x, const Vector& y) {
  require(x.size() == y.size(), Errc::dimension_mismatch, "dot: length mismatch");
  return kernels::active().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, const Vector& x, Vector& y) {
  require(x.size() == y.size(), Errc::dimension_mismatch, "axpy: length mismatch");
  kernels::active().axpy(alpha, x.data(), y.data(), x.size());
}

Vector matvec(const Matrix& a, const Vector& x) {
  require(a.cols() == x.size(), Errc::dimension_mismatch, "matvec: shape mismatch");
  Vector y(a.rows());
  kernels::active().gemv(a.data(), a.rows(), a.cols(), a.cols(), x.data(), y.data());
  return y;
}

Vector matvec_t(const Matrix& a, const Vector& x) {
  require(a.rows() == x.size(), Errc::dimension_mismatch, "matvec_t: shape mismatch");
  Vector y(a.cols());
  kernels::active().gemv_t(a.data(), a.rows(), a.cols(), a.cols(), x.data(), y.data());
  return y;
}

Vector add(Vector x, const Vector& y) {
  axpy(1.0, y, x);
  return x;
}

Vector sub(Vector x, const Vector& y) {
  axpy(-1.0, y, x);
  return x;
}

Vector scaled(Vector x, double alpha) {
  for (auto& v : x) v *= alpha;
  return x;
}

double inf_norm(const Vector& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double two_norm(const Vector& x) {
  return std::sqrt(kernels::active().dot(x.data(), x.data(), x.size()));
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), Errc::dimension_mismatch, "matmul: shape mismatch");
  Matrix bt = transpose(b);
  Matrix out(a.rows(), b.cols());
  const auto& ops = kernels::active();
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c)
      out(r, c) = ops.dot(a.row(r), bt.row(c), a.cols());
  return out;
}

double quad_form(const Matrix& h, const Vector& u) {
  require(h.rows() == u.size() && h.cols() == u.size(), Errc::dimension_mismatch,
          "quad_form: shape mismatch");
  return dot(u, matvec(h, u));
}

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = r + 1; c < a.cols(); ++c)
      if (std::abs(a(r, c) - a(c, r)) > tol) return false;
  return true;
}

double max_abs_diag(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) m = std::max(m, std::abs(a(i, i)));
  return m;
}

bool Cholesky::factor(const Matrix& a, double rel_pivot_tol) {
  valid_ = false;
  if (a.rows() != a.cols()) return false;
  const std::size_t n = a.rows();
  l_ = Matrix(n, n);
  min_pivot_ = 0.0;
  const double scale = std::max(1.0, max_abs_diag(a));
  const double floor = rel_pivot_tol * scale;
  const auto& ops = kernels::active();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j) - ops.dot(l_.row(j), l_.row(j), j);
    if (!(d > floor)) return false;
    min_pivot_ = (j == 0) ? d : std::min(min_pivot_, d);
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i)
      l_(i, j) = (a(i, j) - ops.dot(l_.row(i), l_.row(j), j)) / ljj;
  }
  valid_ = true;
  return true;
}

void Cholesky::solve_in_place(Vector& b) const {
  require(valid_, Errc::not_positive_definite, "Cholesky::solve on invalid factorization");
  require(b.size() == l_.rows(), Errc::dimension_mismatch, "Cholesky::solve: length mismatch");
  const std::size_t n = l_.rows();
  const auto& ops = kernels::active();
  // L y = b
  for (std::size_t i = 0; i < n; ++i)
    b[i] = (b[i] - ops.dot(l_.row(i), b.data(), i)) / l_(i, i);
  // L^T x = y
  for (std::size_t ir = n; ir-- > 0;) {
    double s = b[ir];
    for (std::size_t k = ir + 1; k < n; ++k) s -= l_(k, ir) * b[k];
    b[ir] = s / l_(ir, ir);
  }
}

Vector Cholesky::solve(Vector b) const {
  solve_in_place(b);
  return b;
}

}  // namespace tsmpc::linalg
