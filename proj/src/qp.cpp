#include "tsmpc/qp.hpp"

#include <algorithm>
#include <cmath>

#include "tsmpc/error.hpp"
#include "tsmpc/kernels.hpp"

namespace tsmpc::qp {

using linalg::add;
using linalg::inf_norm;
using linalg::matvec;
using linalg::matvec_t;

std::vector<std::size_t> WorkingSet::inactive() const {
  std::vector<std::size_t> out;
  out.reserve(mask_.size() - active_.size());
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (!mask_[i]) out.push_back(i);
  return out;
}

void WorkingSet::add(std::size_t i) {
  require(i < mask_.size(), Errc::dimension_mismatch, "WorkingSet::add: row out of range");
  require(!mask_[i], Errc::constraint_violation, "WorkingSet::add: row already active");
  mask_[i] = 1;
  active_.push_back(i);
}

void WorkingSet::remove(std::size_t i) {
  require(i < mask_.size(), Errc::dimension_mismatch, "WorkingSet::remove: row out of range");
  require(mask_[i], Errc::constraint_violation, "WorkingSet::remove: row not active");
  mask_[i] = 0;
  active_.erase(std::find(active_.begin(), active_.end(), i));
}

ParametricQp::ParametricQp(Matrix h, Matrix f, Vector g_c, Matrix g, Vector w, Matrix e)
    : h_(std::move(h)), f_(std::move(f)), g_(std::move(g)), e_(std::move(e)),
      g_c_(std::move(g_c)), w_(std::move(w)) {
  const std::size_t n = h_.rows();
  require(h_.cols() == n, Errc::dimension_mismatch, "H must be square");
  require(linalg::is_symmetric(h_, 1e-10), Errc::dimension_mismatch,
          "H must be symmetric within 1e-10");
  require(f_.rows() == n, Errc::dimension_mismatch, "F rows must match n_vars");
  require(g_c_.size() == n, Errc::dimension_mismatch, "g_c length must match n_vars");
  require(g_.cols() == n || g_.rows() == 0, Errc::dimension_mismatch,
          "G cols must match n_vars");
  require(w_.size() == g_.rows(), Errc::dimension_mismatch, "W length must match n_cons");
  require(e_.rows() == g_.rows(), Errc::dimension_mismatch, "E rows must match n_cons");
  require(e_.cols() == f_.cols(), Errc::dimension_mismatch, "E cols must match n_state");
  require(h_factor_.factor(h_), Errc::not_positive_definite,
          "H factorization failed; Hessian is not positive definite");
}

Vector ParametricQp::gradient_at(const Vector& x0) const {
  require(x0.size() == n_state(), Errc::dimension_mismatch, "gradient_at: bad x0 length");
  return add(matvec(f_, x0), g_c_);
}

Vector ParametricQp::bounds_at(const Vector& x0) const {
  require(x0.size() == n_state(), Errc::dimension_mismatch, "bounds_at: bad x0 length");
  if (n_cons() == 0) return {};
  return add(matvec(e_, x0), w_);
}

ParametricQp build_qp(Matrix h, Matrix f, Vector g_c, Matrix g, Vector w, Matrix e) {
  return ParametricQp(std::move(h), std::move(f), std::move(g_c), std::move(g), std::move(w),
                      std::move(e));
}

KktSystem::KktSystem(const ParametricQp& qp, const WorkingSet& ws)
    : qp_(&qp), rows_(ws.active()) {
  require(ws.n_cons() == qp.n_cons(), Errc::dimension_mismatch,
          "KktSystem: working set sized for a different QP");
  const std::size_t k = rows_.size();
  const std::size_t n = qp.n_vars();
  hinv_gt_ = Matrix(k, n);
  Vector col(n);
  for (std::size_t i = 0; i < k; ++i) {
    const double* grow = qp.constraints().row(rows_[i]);
    std::copy(grow, grow + n, col.begin());
    qp.hessian_factor().solve_in_place(col);
    std::copy(col.begin(), col.end(), hinv_gt_.row(i));
  }
  if (k > 0) {
    Matrix s(k, k);
    const auto& ops = kernels::active();
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        s(i, j) = ops.dot(qp.constraints().row(rows_[i]), hinv_gt_.row(j), n);
    require(s_factor_.factor(s), Errc::rank_deficient,
            "active constraint rows are linearly dependent");
  }
}

void KktSystem::solve(const Vector& rhs_grad, const Vector& rhs_bounds, Vector& du,
                      Vector& dl) const {
  const std::size_t n = qp_->n_vars();
  const std::size_t k = rows_.size();
  require(rhs_grad.size() == n, Errc::dimension_mismatch, "solve: rhs_grad length");
  require(rhs_bounds.size() == k, Errc::dimension_mismatch, "solve: rhs_bounds length");
  Vector v = qp_->hessian_factor().solve(rhs_grad);  // H^-1 rhs_grad
  if (k == 0) {
    du = linalg::scaled(std::move(v), -1.0);
    dl.clear();
    return;
  }
  const auto& ops = kernels::active();
  Vector srhs(k);
  for (std::size_t i = 0; i < k; ++i)
    srhs[i] = rhs_bounds[i] + ops.dot(qp_->constraints().row(rows_[i]), v.data(), n);
  dl = s_factor_.solve(std::move(srhs));
  du = matvec_t(hinv_gt_, dl);
  linalg::axpy(-1.0, v, du);
}

Vector KktSystem::dependency_coefficients(std::size_t constraint_row) const {
  const std::size_t k = rows_.size();
  const std::size_t n = qp_->n_vars();
  Vector rhs(k);
  const auto& ops = kernels::active();
  for (std::size_t i = 0; i < k; ++i)
    rhs[i] = ops.dot(hinv_gt_.row(i), qp_->constraints().row(constraint_row), n);
  return s_factor_.solve(std::move(rhs));
}

KktStep solve_kkt(const ParametricQp& qp, const WorkingSet& ws, const Vector& rhs_grad,
                  const Vector& rhs_bounds) {
  KktSystem sys(qp, ws);
  KktStep step;
  sys.solve(rhs_grad, rhs_bounds, step.du, step.dlambda_active);
  return step;
}

double KktReport::worst() const {
  return std::max(std::max(stationarity, primal), std::max(dual, complementarity));
}

KktReport check_kkt_at(const ParametricQp& qp, const QpSolution& sol, const Vector& grad,
                       const Vector& bounds) {
  require(sol.primal.size() == qp.n_vars(), Errc::dimension_mismatch, "check_kkt: primal length");
  require(sol.dual.size() == qp.n_cons(), Errc::dimension_mismatch, "check_kkt: dual length");
  KktReport rep;
  // stationarity: H U + g - G^T lambda
  Vector r = matvec(qp.hessian(), sol.primal);
  linalg::axpy(1.0, grad, r);
  if (qp.n_cons() > 0) linalg::axpy(-1.0, matvec_t(qp.constraints(), sol.dual), r);
  rep.stationarity = inf_norm(r);

  const Vector gu = qp.n_cons() > 0 ? matvec(qp.constraints(), sol.primal) : Vector{};
  for (std::size_t i = 0; i < qp.n_cons(); ++i) {
    const double slack = gu[i] - bounds[i];
    rep.primal = std::max(rep.primal, -slack);
    if (sol.working_set.is_active(i)) {
      rep.primal = std::max(rep.primal, std::abs(slack));
      rep.dual = std::max(rep.dual, -sol.dual[i]);
    } else {
      rep.dual = std::max(rep.dual, std::abs(sol.dual[i]));
    }
    rep.complementarity = std::max(rep.complementarity, std::abs(sol.dual[i] * slack));
  }
  rep.primal = std::max(rep.primal, 0.0);
  rep.dual = std::max(rep.dual, 0.0);
  return rep;
}

KktReport check_kkt(const ParametricQp& qp, const QpSolution& sol) {
  return check_kkt_at(qp, sol, qp.gradient_at(sol.param), qp.bounds_at(sol.param));
}

}  // namespace tsmpc::qp
