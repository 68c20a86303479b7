#pragma once

#include <cstdint>
#include <string>

#include "tsmpc/mpc_config.hpp"
#include "tsmpc/network.hpp"
#include "tsmpc/qp.hpp"
#include "tsmpc/rng.hpp"

// Self-contained optimality oracles used by the built-in verification suite
// and the tests. Everything here solves small problems by exhaustive
// working-set enumeration over plain Gaussian elimination, deliberately
// sharing no code path with the production solver it cross-checks.
namespace tsmpc::verify {

using linalg::Matrix;
using linalg::Vector;

// Gaussian elimination with partial pivoting. Returns false when a pivot
// falls below tol.
bool gaussian_solve(Matrix a, Vector b, Vector& x, double pivot_tol = 1e-11);

struct OracleResult {
  bool feasible = false;
  Vector primal;
  double objective = 0.0;
  std::vector<std::size_t> active;
};

// Global optimum of min 1/2 U'HU + g'U s.t. G U >= b by enumerating every
// working set of size <= n_vars.
OracleResult enumerate_optimum(const Matrix& h, const Vector& g, const Matrix& gmat,
                               const Vector& b, double feas_tol = 1e-8);

struct RandomQpInstance {
  qp::ParametricQp qp;
  Vector x0;  // feasible parameter
  Vector x1;  // nearby parameter, also feasible by construction
};

RandomQpInstance random_feasible_qp(Rng& rng, std::size_t max_vars = 6,
                                    std::size_t max_cons = 10);

// Joint formulation of the N-step problem over z = [U; x_1..x_N] with the
// dynamics as equality rows, solved by enumeration over the inequality rows.
struct SparseMpcProblem {
  Matrix hess;
  Matrix eq;
  Vector eq_rhs;
  Matrix ineq;   // ineq z >= ineq_rhs
  Vector ineq_rhs;
  std::size_t n_inputs_total = 0;  // leading entries of z
};

SparseMpcProblem build_sparse_mpc(const sfm::TrafficNetwork& net, const sfm::StateSpace& ss,
                                  const mpc::MpcConfig& cfg, const Vector& x0);

OracleResult enumerate_sparse(const SparseMpcProblem& sp, double feas_tol = 1e-8);

// Stage cost of an input sequence evaluated by explicit rollout.
double rollout_cost(const sfm::StateSpace& ss, const mpc::Weights& w, const Vector& x0,
                    const Vector& u_seq, std::size_t horizon);

// Random store-and-forward instance small enough for the sparse oracle.
struct SmallMpcInstance {
  sfm::TrafficNetwork net;
  mpc::MpcConfig cfg;
  Vector x0;
};

SmallMpcInstance random_small_mpc(Rng& rng);

// Network used by the worked two-approach intersection checks; also shipped
// as data/two_link.net.
sfm::TrafficNetwork two_link_network();

struct CheckResult {
  std::string name;
  bool passed = false;
  std::size_t instances = 0;
  std::string detail;
};

struct SuiteOptions {
  std::uint64_t seed = 20250301;
  std::size_t qp_instances = 1000;
  std::size_t condensation_instances = 100;
  bool inject_defect = false;  // corrupt one oracle input to prove the suite bites
};

std::vector<CheckResult> run_suite(const SuiteOptions& opts);
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace tsmpc::verify
