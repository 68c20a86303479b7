#include "tsmpc/condense.hpp"

#include "tsmpc/error.hpp"

namespace tsmpc::sfm {

using linalg::matmul;
using linalg::Matrix;
using linalg::transpose;
using linalg::Vector;

mpc::Weights default_weights(const TrafficNetwork& net) {
  const std::size_t n = net.n_links();
  const std::size_t p = net.n_inputs();
  mpc::Weights w;
  w.q = Matrix(n, n);
  for (std::size_t z = 0; z < n; ++z) w.q(z, z) = 1.0 / net.link(z).capacity;
  w.r = Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i) w.r(i, i) = 0.01;
  w.p = w.q;
  return w;
}

Prediction stack_prediction(const StateSpace& ss, std::size_t horizon) {
  const std::size_t n = ss.a.rows();
  const std::size_t p = ss.b.cols();
  require(ss.a.cols() == n && ss.b.rows() == n && ss.e.size() == n, Errc::dimension_mismatch,
          "stack_prediction: inconsistent state space");
  require(horizon >= 1, Errc::dimension_mismatch, "stack_prediction: horizon must be >= 1");

  Prediction pred;
  pred.gamma = Matrix(horizon * n, n);
  pred.omega = Matrix(horizon * n, horizon * p);
  pred.phi = Vector(horizon * n, 0.0);

  // powers[k] = A^k
  std::vector<Matrix> powers(horizon + 1);
  powers[0] = Matrix::identity(n);
  for (std::size_t k = 1; k <= horizon; ++k) powers[k] = matmul(powers[k - 1], ss.a);

  for (std::size_t k = 1; k <= horizon; ++k) {
    const std::size_t row0 = (k - 1) * n;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) pred.gamma(row0 + r, c) = powers[k](r, c);
    for (std::size_t j = 0; j < k; ++j) {
      // block (k, j) = A^{k-1-j} B
      const Matrix blk = matmul(powers[k - 1 - j], ss.b);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < p; ++c) pred.omega(row0 + r, j * p + c) = blk(r, c);
    }
    for (std::size_t j = 0; j < k; ++j) {
      const Vector term = linalg::matvec(powers[j], ss.e);
      for (std::size_t r = 0; r < n; ++r) pred.phi[row0 + r] += term[r];
    }
  }
  return pred;
}

namespace {

// block-diagonal weight stack: Q for steps 1..N-1, P for step N
Matrix stage_weight_stack(const mpc::Weights& w, std::size_t horizon, std::size_t n) {
  Matrix out(horizon * n, horizon * n);
  for (std::size_t k = 1; k <= horizon; ++k) {
    const Matrix& blk = (k == horizon) ? w.p : w.q;
    const std::size_t off = (k - 1) * n;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) out(off + r, off + c) = blk(r, c);
  }
  return out;
}

}  // namespace

qp::ParametricQp condense(const TrafficNetwork& net, const StateSpace& ss,
                          const mpc::MpcConfig& cfg) {
  const std::size_t n = net.n_links();
  const std::size_t p = net.n_inputs();
  const std::size_t nj = net.n_junctions();
  const std::size_t horizon = cfg.horizon;
  require(horizon >= 1, Errc::dimension_mismatch, "condense: horizon must be >= 1");
  require(ss.b.rows() == n && ss.b.cols() == p, Errc::dimension_mismatch,
          "condense: state space does not match the network");

  const mpc::Weights weights = cfg.weights ? *cfg.weights : default_weights(net);
  require(weights.q.rows() == n && weights.q.cols() == n, Errc::dimension_mismatch,
          "condense: Q shape");
  require(weights.p.rows() == n && weights.p.cols() == n, Errc::dimension_mismatch,
          "condense: P shape");
  require(weights.r.rows() == p && weights.r.cols() == p, Errc::dimension_mismatch,
          "condense: R shape");

  const Prediction pred = stack_prediction(ss, horizon);
  const std::size_t s = horizon * p;

  // cost: J(U) = U^T (omega^T Qbar omega + Rbar) U + 2 U^T omega^T Qbar (gamma x0 + phi) + const
  // written as 1/2 U^T H U + U^T g(x0), so H and g carry a factor of two.
  const Matrix qbar = stage_weight_stack(weights, horizon, n);
  const Matrix omega_t = transpose(pred.omega);
  const Matrix qbar_omega = matmul(qbar, pred.omega);

  Matrix h = matmul(omega_t, qbar_omega);
  for (std::size_t k = 0; k < horizon; ++k)
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < p; ++c) h(k * p + r, k * p + c) += weights.r(r, c);
  for (std::size_t r = 0; r < s; ++r)
    for (std::size_t c = 0; c < s; ++c) h(r, c) *= 2.0;
  // symmetrize away accumulation roundoff
  for (std::size_t r = 0; r < s; ++r)
    for (std::size_t c = r + 1; c < s; ++c) {
      const double v = 0.5 * (h(r, c) + h(c, r));
      h(r, c) = v;
      h(c, r) = v;
    }

  const Matrix qbar_gamma = matmul(qbar, pred.gamma);
  Matrix f = matmul(omega_t, qbar_gamma);
  for (std::size_t r = 0; r < s; ++r)
    for (std::size_t c = 0; c < n; ++c) f(r, c) *= 2.0;
  Vector g_c = linalg::matvec_t(qbar_omega, pred.phi);
  for (auto& v : g_c) v *= 2.0;

  // constraint rows in G U >= b(x0) = W + E x0 form
  std::size_t n_rows = horizon * (2 * p + nj);
  std::size_t n_bound_rows = 0;
  for (std::size_t z = 0; z < n; ++z) {
    if (net.link(z).x_min) ++n_bound_rows;
    if (net.link(z).x_max) ++n_bound_rows;
  }
  n_rows += horizon * n_bound_rows;

  Matrix g(n_rows, s);
  Vector w_vec(n_rows, 0.0);
  Matrix e_mat(n_rows, n);
  std::size_t row = 0;

  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t i = 0; i < p; ++i) {  // u >= u_min
      g(row, k * p + i) = 1.0;
      w_vec[row] = cfg.u_min;
      ++row;
    }
    for (std::size_t i = 0; i < p; ++i) {  // -u >= -u_max
      g(row, k * p + i) = -1.0;
      w_vec[row] = -cfg.u_max;
      ++row;
    }
    for (std::size_t j = 0; j < nj; ++j) {  // -sum_phases u >= lost - cycle
      const auto& junction = net.junction(j);
      for (std::size_t i = 0; i < junction.phases.size(); ++i)
        g(row, k * p + net.input_index(j, i)) = -1.0;
      w_vec[row] = junction.lost_time - net.cycle_time();
      ++row;
    }
  }

  for (std::size_t k = 1; k <= horizon; ++k) {
    const std::size_t prow = (k - 1) * n;
    for (std::size_t z = 0; z < n; ++z) {
      const Link& link = net.link(z);
      if (link.x_min) {  // omega_row U >= x_min - gamma_row x0 - phi
        for (std::size_t c = 0; c < s; ++c) g(row, c) = pred.omega(prow + z, c);
        for (std::size_t c = 0; c < n; ++c) e_mat(row, c) = -pred.gamma(prow + z, c);
        w_vec[row] = *link.x_min - pred.phi[prow + z];
        ++row;
      }
      if (link.x_max) {  // -omega_row U >= gamma_row x0 + phi - x_max
        for (std::size_t c = 0; c < s; ++c) g(row, c) = -pred.omega(prow + z, c);
        for (std::size_t c = 0; c < n; ++c) e_mat(row, c) = pred.gamma(prow + z, c);
        w_vec[row] = pred.phi[prow + z] - *link.x_max;
        ++row;
      }
    }
  }

  return qp::ParametricQp(std::move(h), std::move(f), std::move(g_c), std::move(g),
                          std::move(w_vec), std::move(e_mat));
}

}  // namespace tsmpc::sfm
