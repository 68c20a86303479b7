#include <doctest.h>

#include <cmath>

#include "tsmpc/error.hpp"
#include "tsmpc/homotopy.hpp"
#include "tsmpc/qp.hpp"
#include "tsmpc/rng.hpp"
#include "tsmpc/verify.hpp"

using namespace tsmpc;
using linalg::Matrix;
using linalg::Vector;
using qp::ParametricQp;
using qp::WorkingSet;

namespace {

Matrix scaled_identity(std::size_t n, double v) {
  Matrix m = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = v;
  return m;
}

// min 1/2 u'Hu + (F x + g_c)'u  s.t.  G u >= W + E x, single-state parameter
ParametricQp simple_qp(Matrix h, Vector g_c, Matrix g, Vector w) {
  const std::size_t n = h.rows();
  const std::size_t m = g.rows();
  return ParametricQp(std::move(h), Matrix(n, 1), std::move(g_c), std::move(g), std::move(w),
                      Matrix(m, 1));
}

}  // namespace

TEST_CASE("build_qp validates and caches the Hessian factorization") {
  // identity construction
  ParametricQp q(scaled_identity(2, 2.0), Matrix(2, 1), Vector{0, 0}, Matrix::identity(2),
                 Vector{0, 0}, Matrix(2, 1));
  CHECK(q.n_vars() == 2);
  CHECK(q.n_cons() == 2);
  CHECK(q.hessian_factor().valid());

  // symmetry violated by 1e-3
  Matrix bad = scaled_identity(2, 2.0);
  bad(0, 1) = 1e-3;
  CHECK_THROWS_WITH_AS(
      (void)qp::build_qp(bad, Matrix(2, 1), Vector{0, 0}, Matrix::identity(2), Vector{0, 0},
                         Matrix(2, 1)),
      doctest::Contains("symmetric"), Error);

  // indefinite Hessian
  Matrix indef = Matrix::identity(2);
  indef(1, 1) = -1.0;
  try {
    (void)qp::build_qp(indef, Matrix(2, 1), Vector{0, 0}, Matrix::identity(2), Vector{0, 0},
                       Matrix(2, 1));
    FAIL("expected not_positive_definite");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_positive_definite);
  }

  // mismatched shapes
  CHECK_THROWS_AS((void)qp::build_qp(scaled_identity(2, 1.0), Matrix(3, 1), Vector{0, 0},
                                     Matrix::identity(2), Vector{0, 0}, Matrix(2, 1)),
                  Error);
}

TEST_CASE("gradient and bound evaluation are affine in the parameter") {
  // constant maps
  auto q = simple_qp(Matrix::identity(2), Vector{1, 2}, Matrix::identity(2), Vector{-1, -1});
  CHECK(q.gradient_at(Vector{123.0}) == Vector{1, 2});
  CHECK(q.bounds_at(Vector{123.0}) == Vector{-1, -1});
  CHECK_THROWS_AS((void)q.gradient_at(Vector{1.0, 2.0}), Error);

  // identity maps
  ParametricQp ident(Matrix::identity(2), Matrix::identity(2), Vector{0, 0},
                     Matrix::identity(2), Vector{0, 0}, Matrix::identity(2));
  CHECK(ident.gradient_at(Vector{3, -1}) == Vector{3, -1});
  CHECK(ident.bounds_at(Vector{5, 7}) == Vector{5, 7});
}

TEST_CASE("solve_kkt handles the unconstrained and one-constraint saddle systems") {
  // empty working set, H = 2I: du = -H^-1 rhs
  auto q = simple_qp(scaled_identity(2, 2.0), Vector{0, 0}, Matrix::identity(2),
                     Vector{-100, -100});
  const auto step = qp::solve_kkt(q, WorkingSet(2), Vector{2, 4}, {});
  CHECK(step.du[0] == doctest::Approx(-1.0));
  CHECK(step.du[1] == doctest::Approx(-2.0));
  CHECK(step.dlambda_active.empty());

  // H = I, active row [1, 0]: hand-solved 3x3 saddle system
  Matrix g(1, 2);
  g(0, 0) = 1.0;
  auto q1 = simple_qp(Matrix::identity(2), Vector{0, 0}, g, Vector{0});
  WorkingSet ws(1);
  ws.add(0);
  const auto step1 = qp::solve_kkt(q1, ws, Vector{1, 0}, Vector{0});
  CHECK(step1.du[0] == doctest::Approx(0.0));
  CHECK(step1.du[1] == doctest::Approx(0.0));
  CHECK(step1.dlambda_active[0] == doctest::Approx(1.0));

  // two identical active rows are rank deficient
  Matrix dup(2, 2);
  dup(0, 0) = 1.0;
  dup(1, 0) = 1.0;
  auto q2 = simple_qp(Matrix::identity(2), Vector{0, 0}, dup, Vector{0, 0});
  WorkingSet ws2(2);
  ws2.add(0);
  ws2.add(1);
  try {
    (void)qp::solve_kkt(q2, ws2, Vector{1, 0}, Vector{0, 0});
    FAIL("expected rank_deficient");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::rank_deficient);
  }
}

TEST_CASE("solve_kkt residuals meet the stated bound on random systems") {
  Rng rng(21);
  for (int it = 0; it < 60; ++it) {
    const std::size_t n = 2 + rng.below(5);
    const std::size_t k = rng.below(n);
    Matrix mf(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) mf(r, c) = rng.uniform(-1.0, 1.0);
    Matrix h = linalg::matmul(linalg::transpose(mf), mf);
    for (std::size_t i = 0; i < n; ++i) h(i, i) += 0.4;
    Matrix g(std::max<std::size_t>(k, 1), n);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < n; ++c) g(r, c) = rng.uniform(-1.0, 1.0);
    auto q = simple_qp(h, Vector(n, 0.0), g, Vector(g.rows(), -10.0));
    WorkingSet ws(g.rows());
    for (std::size_t i = 0; i < k; ++i) ws.add(i);
    Vector rg(n), rb(k);
    for (auto& v : rg) v = rng.uniform(-3.0, 3.0);
    for (auto& v : rb) v = rng.uniform(-3.0, 3.0);
    const auto step = qp::solve_kkt(q, ws, rg, rb);

    // H du - G_A' dl = -rg ; G_A du = rb
    Vector top = linalg::matvec(q.hessian(), step.du);
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t c = 0; c < n; ++c)
        top[c] -= q.constraints()(ws.active()[p], c) * step.dlambda_active[p];
    double res = 0.0;
    for (std::size_t c = 0; c < n; ++c) res = std::max(res, std::abs(top[c] + rg[c]));
    for (std::size_t p = 0; p < k; ++p) {
      double gu = 0.0;
      for (std::size_t c = 0; c < n; ++c) gu += q.constraints()(ws.active()[p], c) * step.du[c];
      res = std::max(res, std::abs(gu - rb[p]));
    }
    const double rhs_norm = std::max(linalg::inf_norm(rg), linalg::inf_norm(rb));
    CHECK(res <= 1e-9 * (1.0 + rhs_norm));
  }
}

TEST_CASE("check_kkt reports zero at an optimum and scales with a perturbation") {
  // unconstrained optimum of 1/2 u'Hu + g'u at u = -H^-1 g
  Matrix h = scaled_identity(2, 2.0);
  h(0, 1) = h(1, 0) = 0.5;
  auto q = simple_qp(h, Vector{1, -2}, Matrix::identity(2), Vector{-100, -100});
  qp::QpSolution sol;
  sol.primal = q.hessian_factor().solve(Vector{-1, 2});
  sol.dual = Vector{0, 0};
  sol.working_set = WorkingSet(2);
  sol.param = Vector{0.0};
  const auto rep = qp::check_kkt(q, sol);
  CHECK(rep.worst() <= 1e-12);

  sol.primal[0] += 1e-3;
  const auto rep2 = qp::check_kkt(q, sol);
  CHECK(rep2.stationarity >= 1e-4);
  CHECK(rep2.stationarity <= 3e-3);
}

TEST_CASE("cold_start solves the worked box examples") {
  // interior optimum: H = I, g = 0, -1 <= u <= 1
  Matrix box(4, 2);
  box(0, 0) = 1; box(1, 1) = 1; box(2, 0) = -1; box(3, 1) = -1;
  auto q = simple_qp(Matrix::identity(2), Vector{0, 0}, box, Vector{-1, -1, -1, -1});
  const auto sol = qp::cold_start(q, Vector{0.0});
  CHECK(linalg::inf_norm(sol.primal) <= 1e-12);
  CHECK(sol.working_set.size() == 0);

  // one active bound: H = I, g = [-3, 0], u1 <= 1  ->  u* = [1, 0], lambda = 2
  Matrix up(1, 2);
  up(0, 0) = -1.0;
  auto q1 = simple_qp(Matrix::identity(2), Vector{-3, 0}, up, Vector{-1});
  qp::SolveStats stats;
  const auto sol1 = qp::cold_start(q1, Vector{0.0}, &stats);
  CHECK(sol1.primal[0] == doctest::Approx(1.0));
  CHECK(sol1.primal[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol1.working_set.is_active(0));
  CHECK(sol1.dual[0] == doctest::Approx(2.0));
  CHECK(stats.working_set_changes >= 1);
  CHECK(qp::check_kkt(q1, sol1).worst() <= 1e-8);
}

TEST_CASE("cold_start matches the enumeration oracle on random QPs") {
  Rng rng(5);
  for (int it = 0; it < 120; ++it) {
    auto inst = verify::random_feasible_qp(rng);
    const auto oracle = verify::enumerate_optimum(inst.qp.hessian(),
                                                  inst.qp.gradient_at(inst.x0),
                                                  inst.qp.constraints(),
                                                  inst.qp.bounds_at(inst.x0));
    REQUIRE(oracle.feasible);
    const auto sol = qp::cold_start(inst.qp, inst.x0);
    CHECK(linalg::inf_norm(linalg::sub(sol.primal, oracle.primal)) <= 1e-7);
    CHECK(qp::check_kkt(inst.qp, sol).worst() <= 1e-8);
  }
}

TEST_CASE("cold_start reports an infeasible constraint system") {
  // bounds at x are [0, 1-x]: u >= 0 and u <= x-1, empty whenever x < 1
  Matrix g(2, 1);
  g(0, 0) = 1.0;
  g(1, 0) = -1.0;
  Matrix e(2, 1);
  e(1, 0) = -1.0;
  ParametricQp q(Matrix::identity(1), Matrix(1, 1), Vector{0}, g, Vector{0, 1}, e);
  // bounds at x: [0, 1 - x]; feasible needs u >= 0 and u <= x - 1
  try {
    (void)qp::cold_start(q, Vector{-1.0});
    FAIL("expected infeasible");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::infeasible);
  }
  // and a feasible parameter works
  const auto ok = qp::cold_start(q, Vector{3.0});
  CHECK(qp::check_kkt(q, ok).worst() <= 1e-9);
}

TEST_CASE("working set keeps its partition invariant under mutation") {
  Rng rng(17);
  WorkingSet ws(12);
  std::vector<char> ref(12, 0);
  for (int it = 0; it < 300; ++it) {
    const std::size_t i = rng.below(12);
    if (ref[i]) {
      ws.remove(i);
      ref[i] = 0;
    } else {
      ws.add(i);
      ref[i] = 1;
    }
    std::vector<char> seen(12, 0);
    for (const std::size_t a : ws.active()) {
      CHECK(ws.is_active(a));
      CHECK(!seen[a]);
      seen[a] = 1;
    }
    for (const std::size_t a : ws.inactive()) {
      CHECK(!ws.is_active(a));
      CHECK(!seen[a]);
      seen[a] = 1;
    }
    for (std::size_t z = 0; z < 12; ++z) CHECK(seen[z] == 1);
  }
  CHECK_THROWS_AS(ws.add(12), Error);
}
