#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "tsmpc/linalg.hpp"

namespace tsmpc::qp {

using linalg::Cholesky;
using linalg::Matrix;
using linalg::Vector;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

struct Tolerances {
  double primal = 1e-9;     // feasibility slack
  double dual = 1e-9;       // multiplier sign slack
  double zero_step = 1e-12; // denominator threshold in ratio tests
};

// Ordered set of constraint rows treated as equalities, plus its complement.
class WorkingSet {
 public:
  WorkingSet() = default;
  explicit WorkingSet(std::size_t n_cons) : mask_(n_cons, 0) {}

  std::size_t n_cons() const { return mask_.size(); }
  std::size_t size() const { return active_.size(); }
  const std::vector<std::size_t>& active() const { return active_; }
  std::vector<std::size_t> inactive() const;
  bool is_active(std::size_t i) const { return mask_[i] != 0; }

  void add(std::size_t i);
  void remove(std::size_t i);

 private:
  std::vector<std::size_t> active_;
  std::vector<char> mask_;
};

// Convex QP family over parameter x0:
//   min_U  1/2 U^T H U + U^T g(x0)   s.t.  G U >= b(x0)
// with g(x0) = F x0 + g_c and b(x0) = W + E x0. H is factorized once at
// construction and reused by every KKT solve.
class ParametricQp {
 public:
  ParametricQp(Matrix h, Matrix f, Vector g_c, Matrix g, Vector w, Matrix e);

  std::size_t n_vars() const { return h_.rows(); }
  std::size_t n_cons() const { return g_.rows(); }
  std::size_t n_state() const { return f_.cols(); }

  const Matrix& hessian() const { return h_; }
  const Matrix& gradient_sensitivity() const { return f_; }
  const Vector& gradient_offset() const { return g_c_; }
  const Matrix& constraints() const { return g_; }
  const Vector& bound_offset() const { return w_; }
  const Matrix& bound_sensitivity() const { return e_; }
  const Cholesky& hessian_factor() const { return h_factor_; }

  Vector gradient_at(const Vector& x0) const;  // F x0 + g_c
  Vector bounds_at(const Vector& x0) const;    // W + E x0

 private:
  Matrix h_, f_, g_, e_;
  Vector g_c_, w_;
  Cholesky h_factor_;
};

ParametricQp build_qp(Matrix h, Matrix f, Vector g_c, Matrix g, Vector w, Matrix e);

struct QpSolution {
  Vector primal;           // U*
  Vector dual;             // lambda*, zero on inactive rows
  WorkingSet working_set;
  Vector param;            // x0 at which this solution is optimal
};

// Factorization of the saddle system [[H, G_A^T], [G_A, 0]] for one working
// set: Cholesky of H (borrowed from the QP) plus a Schur complement
// S = G_A H^-1 G_A^T refactorized whenever the set changes. A failed S
// factorization reports the active rows as rank deficient.
class KktSystem {
 public:
  KktSystem(const ParametricQp& qp, const WorkingSet& ws);

  std::size_t n_active() const { return rows_.size(); }
  const std::vector<std::size_t>& rows() const { return rows_; }

  // Solves H du - G_A^T dl = -rhs_grad,  G_A du = rhs_bounds.
  void solve(const Vector& rhs_grad, const Vector& rhs_bounds, Vector& du, Vector& dl) const;

  // Coefficients c with G_row = sum_i c_i G_active_i, valid when the row is
  // linearly dependent on the active rows. Used by the exchange safeguard.
  Vector dependency_coefficients(std::size_t constraint_row) const;

 private:
  const ParametricQp* qp_;
  std::vector<std::size_t> rows_;
  Matrix hinv_gt_;      // row i = H^-1 G_{rows_[i]}^T
  Cholesky s_factor_;
};

struct KktStep {
  Vector du;
  Vector dlambda_active;  // ordered like ws.active()
};

KktStep solve_kkt(const ParametricQp& qp, const WorkingSet& ws, const Vector& rhs_grad,
                  const Vector& rhs_bounds);

struct KktReport {
  double stationarity = 0.0;
  double primal = 0.0;          // worst of: feasibility violation, active-row residual
  double dual = 0.0;            // worst of: negative active multiplier, nonzero inactive one
  double complementarity = 0.0;

  double worst() const;
  bool within(double tol) const { return worst() <= tol; }
};

KktReport check_kkt(const ParametricQp& qp, const QpSolution& sol);
// Same check against an explicit gradient/bound pair instead of sol.param.
KktReport check_kkt_at(const ParametricQp& qp, const QpSolution& sol, const Vector& grad,
                       const Vector& bounds);

struct SolveStats {
  std::size_t working_set_changes = 0;
};

// Solves QP(x0) from scratch: an auxiliary QP with the same H and G whose
// optimum is the origin (all constraints shifted strictly inactive there) is
// moved to (g(x0), b(x0)) by the same homotopy that serves warm starts.
QpSolution cold_start(const ParametricQp& qp, const Vector& x0, SolveStats* stats = nullptr);

}  // namespace tsmpc::qp
