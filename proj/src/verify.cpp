#include "tsmpc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsmpc/condense.hpp"
#include "tsmpc/error.hpp"
#include "tsmpc/homotopy.hpp"
#include "tsmpc/kernels.hpp"
#include "tsmpc/sim.hpp"

namespace tsmpc::verify {

using sfm::Junction;
using sfm::Link;
using sfm::Phase;

bool gaussian_solve(Matrix a, Vector b, Vector& x, double pivot_tol) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) return false;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) < pivot_tol) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / a(col, col);
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      b[r] -= factor * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t ir = n; ir-- > 0;) {
    double s = b[ir];
    for (std::size_t c = ir + 1; c < n; ++c) s -= a(ir, c) * x[c];
    x[ir] = s / a(ir, ir);
  }
  return true;
}

namespace {

double objective_of(const Matrix& h, const Vector& g, const Vector& u) {
  double quad = 0.0;
  for (std::size_t r = 0; r < h.rows(); ++r)
    for (std::size_t c = 0; c < h.cols(); ++c) quad += u[r] * h(r, c) * u[c];
  double lin = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) lin += g[i] * u[i];
  return 0.5 * quad + lin;
}

// iterate subsets of {0..m-1} with at most max_size elements
template <typename Fn>
void for_each_subset(std::size_t m, std::size_t max_size, Fn&& fn) {
  std::vector<std::size_t> chosen;
  const auto rec = [&](auto&& self, std::size_t next) -> void {
    fn(chosen);
    if (chosen.size() == max_size) return;
    for (std::size_t i = next; i < m; ++i) {
      chosen.push_back(i);
      self(self, i + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace

OracleResult enumerate_optimum(const Matrix& h, const Vector& g, const Matrix& gmat,
                               const Vector& b, double feas_tol) {
  const std::size_t n = h.rows();
  const std::size_t m = gmat.rows();
  OracleResult best;

  for_each_subset(m, std::min(n, m), [&](const std::vector<std::size_t>& act) {
    const std::size_t k = act.size();
    Matrix kkt(n + k, n + k);
    Vector rhs(n + k, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) kkt(r, c) = h(r, c);
      rhs[r] = -g[r];
    }
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t c = 0; c < n; ++c) {
        kkt(c, n + p) = -gmat(act[p], c);
        kkt(n + p, c) = gmat(act[p], c);
      }
      rhs[n + p] = b[act[p]];
    }
    Vector sol;
    if (!gaussian_solve(std::move(kkt), std::move(rhs), sol)) return;

    for (std::size_t p = 0; p < k; ++p)
      if (sol[n + p] < -feas_tol) return;
    Vector u(sol.begin(), sol.begin() + n);
    for (std::size_t i = 0; i < m; ++i) {
      double gu = 0.0;
      for (std::size_t c = 0; c < n; ++c) gu += gmat(i, c) * u[c];
      if (gu < b[i] - feas_tol) return;
    }
    const double obj = objective_of(h, g, u);
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.primal = std::move(u);
      best.objective = obj;
      best.active = act;
    }
  });
  return best;
}

RandomQpInstance random_feasible_qp(Rng& rng, std::size_t max_vars, std::size_t max_cons) {
  const std::size_t n = 2 + rng.below(max_vars - 1);
  const std::size_t m = 1 + rng.below(max_cons);
  const std::size_t ns = 1 + rng.below(3);

  Matrix mfac(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) mfac(r, c) = rng.uniform(-1.0, 1.0);
  Matrix h = linalg::matmul(linalg::transpose(mfac), mfac);
  const double ridge = 0.3 + rng.next_double();
  for (std::size_t i = 0; i < n; ++i) h(i, i) += ridge;

  Matrix f(n, ns);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < ns; ++c) f(r, c) = rng.uniform(-1.0, 1.0);
  Vector g_c(n);
  for (auto& v : g_c) v = rng.uniform(-2.0, 2.0);

  Matrix gmat(m, n);
  for (std::size_t r = 0; r < m; ++r) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        gmat(r, c) = rng.uniform(-1.0, 1.0);
        norm += std::abs(gmat(r, c));
      }
    } while (norm < 0.2);
  }
  Matrix e(m, ns);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < ns; ++c) e(r, c) = rng.uniform(-1.0, 1.0);

  Vector x0(ns), dx(ns);
  for (auto& v : x0) v = rng.uniform(-1.0, 1.0);
  for (auto& v : dx) v = rng.uniform(-0.3, 0.3);
  Vector x1 = linalg::add(x0, dx);

  // interior point with margins covering the x0 -> x1 move
  Vector u_f(n);
  for (auto& v : u_f) v = rng.uniform(-1.0, 1.0);
  Vector w(m);
  for (std::size_t r = 0; r < m; ++r) {
    double gu = 0.0, e_row = 0.0;
    for (std::size_t c = 0; c < n; ++c) gu += gmat(r, c) * u_f[c];
    for (std::size_t c = 0; c < ns; ++c) e_row += std::abs(e(r, c));
    double ex0 = 0.0;
    for (std::size_t c = 0; c < ns; ++c) ex0 += e(r, c) * x0[c];
    const double margin = 0.05 + 0.5 * rng.next_double() + 0.31 * e_row;
    w[r] = gu - margin - ex0;
  }

  return {qp::ParametricQp(std::move(h), std::move(f), std::move(g_c), std::move(gmat),
                           std::move(w), std::move(e)),
          std::move(x0), std::move(x1)};
}

SparseMpcProblem build_sparse_mpc(const sfm::TrafficNetwork& net, const sfm::StateSpace& ss,
                                  const mpc::MpcConfig& cfg, const Vector& x0) {
  const std::size_t n = net.n_links();
  const std::size_t p = net.n_inputs();
  const std::size_t nn = cfg.horizon;
  const std::size_t nu = nn * p;
  const std::size_t nz = nu + nn * n;
  const mpc::Weights w = cfg.weights ? *cfg.weights : sfm::default_weights(net);

  SparseMpcProblem sp;
  sp.n_inputs_total = nu;
  sp.hess = Matrix(nz, nz);
  for (std::size_t k = 0; k < nn; ++k)
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < p; ++c) sp.hess(k * p + r, k * p + c) = 2.0 * w.r(r, c);
  for (std::size_t k = 1; k <= nn; ++k) {
    const Matrix& blk = (k == nn) ? w.p : w.q;
    const std::size_t off = nu + (k - 1) * n;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) sp.hess(off + r, off + c) = 2.0 * blk(r, c);
  }

  // dynamics rows: x_{k+1} - A x_k - B u_k = e
  sp.eq = Matrix(nn * n, nz);
  sp.eq_rhs = Vector(nn * n);
  for (std::size_t k = 0; k < nn; ++k) {
    const std::size_t row0 = k * n;
    for (std::size_t r = 0; r < n; ++r) {
      sp.eq(row0 + r, nu + k * n + r) = 1.0;
      for (std::size_t c = 0; c < p; ++c) sp.eq(row0 + r, k * p + c) = -ss.b(r, c);
      sp.eq_rhs[row0 + r] = ss.e[r];
      if (k == 0) {
        for (std::size_t c = 0; c < n; ++c) sp.eq_rhs[row0 + r] += ss.a(r, c) * x0[c];
      } else {
        for (std::size_t c = 0; c < n; ++c) sp.eq(row0 + r, nu + (k - 1) * n + c) = -ss.a(r, c);
      }
    }
  }

  std::vector<Vector> rows;
  std::vector<double> rhs;
  const auto push_row = [&](Vector row, double value) {
    rows.push_back(std::move(row));
    rhs.push_back(value);
  };
  for (std::size_t k = 0; k < nn; ++k) {
    for (std::size_t i = 0; i < p; ++i) {
      Vector lo(nz, 0.0), hi(nz, 0.0);
      lo[k * p + i] = 1.0;
      hi[k * p + i] = -1.0;
      push_row(std::move(lo), cfg.u_min);
      push_row(std::move(hi), -cfg.u_max);
    }
    for (std::size_t j = 0; j < net.n_junctions(); ++j) {
      const auto& junction = net.junction(j);
      Vector row(nz, 0.0);
      for (std::size_t i = 0; i < junction.phases.size(); ++i)
        row[k * p + net.input_index(j, i)] = -1.0;
      push_row(std::move(row), junction.lost_time - net.cycle_time());
    }
  }
  for (std::size_t k = 1; k <= nn; ++k)
    for (std::size_t z = 0; z < n; ++z) {
      const Link& link = net.link(z);
      if (link.x_min) {
        Vector row(nz, 0.0);
        row[nu + (k - 1) * n + z] = 1.0;
        push_row(std::move(row), *link.x_min);
      }
      if (link.x_max) {
        Vector row(nz, 0.0);
        row[nu + (k - 1) * n + z] = -1.0;
        push_row(std::move(row), -*link.x_max);
      }
    }

  sp.ineq = Matrix(rows.size(), nz);
  sp.ineq_rhs = Vector(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < nz; ++c) sp.ineq(r, c) = rows[r][c];
    sp.ineq_rhs[r] = rhs[r];
  }
  return sp;
}

OracleResult enumerate_sparse(const SparseMpcProblem& sp, double feas_tol) {
  const std::size_t nz = sp.hess.rows();
  const std::size_t ne = sp.eq.rows();
  const std::size_t mi = sp.ineq.rows();
  const std::size_t cap = nz - ne;  // room left after the equality rows
  OracleResult best;

  for_each_subset(mi, std::min(cap, mi), [&](const std::vector<std::size_t>& act) {
    const std::size_t k = act.size();
    const std::size_t dim = nz + ne + k;
    Matrix kkt(dim, dim);
    Vector rhs(dim, 0.0);
    for (std::size_t r = 0; r < nz; ++r)
      for (std::size_t c = 0; c < nz; ++c) kkt(r, c) = sp.hess(r, c);
    for (std::size_t r = 0; r < ne; ++r) {
      for (std::size_t c = 0; c < nz; ++c) {
        kkt(nz + r, c) = sp.eq(r, c);
        kkt(c, nz + r) = sp.eq(r, c);
      }
      rhs[nz + r] = sp.eq_rhs[r];
    }
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t c = 0; c < nz; ++c) {
        kkt(nz + ne + p, c) = sp.ineq(act[p], c);
        kkt(c, nz + ne + p) = -sp.ineq(act[p], c);
      }
      rhs[nz + ne + p] = sp.ineq_rhs[act[p]];
    }
    Vector sol;
    if (!gaussian_solve(std::move(kkt), std::move(rhs), sol)) return;
    for (std::size_t p = 0; p < k; ++p)
      if (sol[nz + ne + p] < -feas_tol) return;
    Vector z(sol.begin(), sol.begin() + nz);
    for (std::size_t i = 0; i < mi; ++i) {
      double gz = 0.0;
      for (std::size_t c = 0; c < nz; ++c) gz += sp.ineq(i, c) * z[c];
      if (gz < sp.ineq_rhs[i] - feas_tol) return;
    }
    double quad = 0.0;
    for (std::size_t r = 0; r < nz; ++r)
      for (std::size_t c = 0; c < nz; ++c) quad += z[r] * sp.hess(r, c) * z[c];
    const double obj = 0.5 * quad;
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.primal = std::move(z);
      best.objective = obj;
      best.active = act;
    }
  });
  return best;
}

double rollout_cost(const sfm::StateSpace& ss, const mpc::Weights& w, const Vector& x0,
                    const Vector& u_seq, std::size_t horizon) {
  const std::size_t n = ss.a.rows();
  const std::size_t p = ss.b.cols();
  Vector x = x0;
  double cost = 0.0;
  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < p; ++c)
        cost += u_seq[k * p + r] * w.r(r, c) * u_seq[k * p + c];
    Vector xn(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      double v = ss.e[r];
      for (std::size_t c = 0; c < n; ++c) v += ss.a(r, c) * x[c];
      for (std::size_t c = 0; c < p; ++c) v += ss.b(r, c) * u_seq[k * p + c];
      xn[r] = v;
    }
    x = std::move(xn);
    const Matrix& blk = (k + 1 == horizon) ? w.p : w.q;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) cost += x[r] * blk(r, c) * x[c];
  }
  return cost;
}

SmallMpcInstance random_small_mpc(Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::size_t horizon = 1 + rng.below(3);
    const std::size_t n_junc = (horizon == 1 && rng.next_double() < 0.4) ? 2 : 1;
    std::vector<Junction> junctions(n_junc);
    std::vector<Link> links(1 + rng.below(4));

    std::size_t phase_budget = horizon == 1 ? 3 : (horizon == 2 ? 2 : 1);
    std::size_t total_phases = 0;
    for (std::size_t j = 0; j < n_junc; ++j) {
      junctions[j].id = "J" + std::to_string(j);
      junctions[j].lost_time = rng.uniform(0.0, 8.0);
      const std::size_t ph = 1 + rng.below(std::max<std::size_t>(phase_budget, 1));
      junctions[j].phases.resize(ph);
      phase_budget -= std::min(phase_budget, ph - 1);
      total_phases += ph;
    }
    for (std::size_t z = 0; z < links.size(); ++z) {
      links[z].id = "L" + std::to_string(z);
      links[z].capacity = rng.uniform(50.0, 150.0);
      links[z].saturation = rng.uniform(900.0, 2000.0) / 3600.0;
      if (rng.next_double() < 0.5) links[z].demand = rng.uniform(0.0, 800.0) / 3600.0;
      if (rng.next_double() < 0.2) links[z].exit = rng.uniform(0.0, 200.0) / 3600.0;
      const std::size_t j = rng.below(n_junc);
      const std::size_t ph = rng.below(junctions[j].phases.size());
      junctions[j].phases[ph].links.push_back(z);
    }
    // drop empty phases
    for (auto& junction : junctions) {
      std::erase_if(junction.phases, [](const Phase& ph) { return ph.links.empty(); });
      if (junction.phases.empty()) junction.phases.push_back({{0}});
    }
    total_phases = 0;
    for (const auto& junction : junctions) total_phases += junction.phases.size();

    std::vector<std::vector<double>> rates(links.size(), std::vector<double>(links.size(), 0.0));
    for (std::size_t w = 0; w < links.size(); ++w) {
      double left = 0.9;
      for (std::size_t z = 0; z < links.size(); ++z) {
        if (z == w || rng.next_double() < 0.6) continue;
        const double r = std::min(left, rng.uniform(0.1, 0.5));
        rates[w][z] = r;
        left -= r;
        if (left <= 0.1) break;
      }
    }

    mpc::MpcConfig cfg;
    cfg.horizon = horizon;
    cfg.u_min = rng.uniform(2.0, 8.0);
    cfg.u_max = rng.uniform(25.0, 50.0);
    const double cycle = 60.0;

    bool ok = true;
    for (const auto& junction : junctions)
      if (junction.phases.size() * cfg.u_min + junction.lost_time > cycle - 1.0) ok = false;
    if (!ok) continue;

    // inequality-row budget keeps the sparse enumeration tractable
    const std::size_t base_rows = horizon * (2 * total_phases + n_junc);
    if (base_rows > 10) continue;
    std::size_t budget = 12 - base_rows;

    Vector x0(links.size());
    for (std::size_t z = 0; z < links.size(); ++z)
      x0[z] = rng.uniform(0.0, 0.8 * links[z].capacity);
    for (std::size_t z = 0; z < links.size() && budget >= horizon; ++z) {
      if (rng.next_double() < 0.5) continue;
      links[z].x_max = x0[z] + rng.uniform(5.0, 60.0);
      budget -= horizon;
      if (budget >= horizon && rng.next_double() < 0.3) {
        links[z].x_min = -rng.uniform(5.0, 60.0);
        budget -= horizon;
      }
    }

    try {
      sfm::TrafficNetwork net("random-small", cycle, std::move(links), std::move(junctions),
                              std::move(rates), {});
      // accepted only when the instance is actually solvable
      const auto ss = linearize(net);
      const auto sp = build_sparse_mpc(net, ss, cfg, x0);
      if (!enumerate_sparse(sp).feasible) continue;
      return {std::move(net), cfg, std::move(x0)};
    } catch (const Error&) {
      continue;
    }
  }
  fail(Errc::iteration_limit, "random_small_mpc: no feasible instance in 100 attempts");
}

sfm::TrafficNetwork two_link_network() {
  static const char* text = R"(# two one-phase approaches crossing at one junction
[meta]
name = two-link
cycle_time = 60

[links]
north capacity=140 saturation=1728 demand=2280 x_min=0 x_max=140
west  capacity=110 saturation=1728 demand=2280 x_min=0 x_max=110

[junctions]
J lost=0 north west
)";
  std::istringstream in(text);
  return sfm::parse_network(in, "two_link");
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

CheckResult check_qp_oracle(const SuiteOptions& opts) {
  CheckResult res{"qp-oracle-equivalence", true, 0, ""};
  Rng rng(opts.seed);
  for (std::size_t it = 0; it < opts.qp_instances; ++it) {
    RandomQpInstance inst = random_feasible_qp(rng);
    Vector g0 = inst.qp.gradient_at(inst.x0);
    if (opts.inject_defect && it == 0) g0[0] = -g0[0] + 1.0;
    const OracleResult oracle0 =
        enumerate_optimum(inst.qp.hessian(), g0, inst.qp.constraints(),
                          inst.qp.bounds_at(inst.x0));
    if (!oracle0.feasible) {
      res.passed = false;
      res.detail = "instance " + std::to_string(it) + ": oracle found no optimum";
      break;
    }
    const qp::QpSolution cold = qp::cold_start(inst.qp, inst.x0);
    const double cold_gap = linalg::inf_norm(linalg::sub(cold.primal, oracle0.primal));
    const double kkt_worst = qp::check_kkt(inst.qp, cold).worst();
    if (cold_gap > 1e-7 || kkt_worst > 1e-8) {
      res.passed = false;
      res.detail = "instance " + std::to_string(it) + ": cold-start gap " + fmt(cold_gap) +
                   ", kkt " + fmt(kkt_worst);
      break;
    }
    const OracleResult oracle1 =
        enumerate_optimum(inst.qp.hessian(), inst.qp.gradient_at(inst.x1),
                          inst.qp.constraints(), inst.qp.bounds_at(inst.x1));
    const auto hot = qp::hot_solve(cold, inst.x1, inst.qp);
    const double hot_gap = linalg::inf_norm(linalg::sub(hot.solution.primal, oracle1.primal));
    if (!oracle1.feasible || hot_gap > 1e-7) {
      res.passed = false;
      res.detail = "instance " + std::to_string(it) + ": hot-solve gap " + fmt(hot_gap);
      break;
    }
    ++res.instances;
  }
  return res;
}

CheckResult check_condensation(const SuiteOptions& opts) {
  CheckResult res{"condensation-oracle", true, 0, ""};
  Rng rng(opts.seed + 1);

  const auto compare = [&](const sfm::TrafficNetwork& net, const mpc::MpcConfig& cfg,
                           const Vector& x0, const std::string& label) {
    const auto ss = linearize(net);
    const auto qp_prob = sfm::condense(net, ss, cfg);
    const qp::QpSolution sol = qp::cold_start(qp_prob, x0);
    const auto sp = build_sparse_mpc(net, ss, cfg, x0);
    const OracleResult oracle = enumerate_sparse(sp);
    if (!oracle.feasible) {
      res.passed = false;
      res.detail = label + ": sparse oracle infeasible";
      return false;
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < sp.n_inputs_total; ++i)
      gap = std::max(gap, std::abs(sol.primal[i] - oracle.primal[i]));
    const mpc::Weights w = cfg.weights ? *cfg.weights : sfm::default_weights(net);
    const double j_cond = rollout_cost(ss, w, x0, sol.primal, cfg.horizon);
    Vector u_oracle(oracle.primal.begin(), oracle.primal.begin() + sp.n_inputs_total);
    const double j_oracle = rollout_cost(ss, w, x0, u_oracle, cfg.horizon);
    const double j_gap = std::abs(j_cond - j_oracle) / (1.0 + std::abs(j_oracle));
    if (gap > 1e-7 || j_gap > 1e-7) {
      res.passed = false;
      res.detail = label + ": optimizer gap " + fmt(gap) + ", objective gap " + fmt(j_gap);
      return false;
    }
    ++res.instances;
    return true;
  };

  // the worked two-approach example first
  {
    const auto net = two_link_network();
    mpc::MpcConfig cfg;
    cfg.horizon = 1;
    if (!compare(net, cfg, {100.0, 90.0}, "two-link N=1")) return res;
  }
  for (std::size_t it = 0; res.passed && it < opts.condensation_instances; ++it) {
    SmallMpcInstance inst = random_small_mpc(rng);
    if (!compare(inst.net, inst.cfg, inst.x0, "instance " + std::to_string(it))) return res;
  }
  return res;
}

CheckResult check_two_link_loop(const SuiteOptions& opts) {
  (void)opts;
  CheckResult res{"two-link-closed-loop", true, 0, ""};
  const auto net = two_link_network();
  sim::RunOptions run;
  run.cfg.horizon = 1;
  run.scenario.kind = sim::Scenario::Kind::constant;
  run.scenario.rate = 1200.0;  // no source links: known demand only
  run.scenario.horizon_cycles = 5;
  run.x0 = {0.0, 0.0};

  run.strategy = mpc::Strategy::cold;
  const auto cold = sim::run_closed_loop(net, run);
  run.strategy = mpc::Strategy::oass;
  const auto oass = sim::run_closed_loop(net, run);

  for (std::size_t c = 0; c < run.scenario.horizon_cycles; ++c) {
    for (std::size_t i = 0; i < net.n_inputs(); ++i)
      if (std::abs(cold.greens(c, i) - oass.greens(c, i)) > 1e-6) {
        res.passed = false;
        res.detail = "plans differ at cycle " + std::to_string(c);
        return res;
      }
    const auto& cc = cold.metrics.cycles[c];
    const auto& oc = oass.metrics.cycles[c];
    if (c > 0 && oc.changes_total > cc.changes_total) {
      res.passed = false;
      res.detail = "warm start did more work than cold at cycle " + std::to_string(c);
      return res;
    }
    ++res.instances;
  }
  return res;
}

CheckResult check_kernels(const SuiteOptions& opts) {
  CheckResult res{"kernel-equivalence", true, 0, ""};
  const auto& scalar = kernels::scalar_ops();
  Rng rng(opts.seed + 2);
  for (const auto* ops : kernels::available_ops()) {
    if (ops == &scalar) continue;
    for (std::size_t len = 0; len <= 67; ++len) {
      Vector x(len), y(len);
      for (auto& v : x) v = rng.uniform(-10.0, 10.0);
      for (auto& v : y) v = rng.uniform(-10.0, 10.0);
      const double tol = 1e-12 * (1.0 + static_cast<double>(len) * 100.0);
      if (std::abs(ops->dot(x.data(), y.data(), len) -
                   scalar.dot(x.data(), y.data(), len)) > tol) {
        res.passed = false;
        res.detail = std::string(ops->name) + " dot mismatch at length " + std::to_string(len);
        return res;
      }
      Vector y1 = y, y2 = y;
      ops->axpy(1.7, x.data(), y1.data(), len);
      scalar.axpy(1.7, x.data(), y2.data(), len);
      for (std::size_t i = 0; i < len; ++i)
        if (std::abs(y1[i] - y2[i]) > tol) {
          res.passed = false;
          res.detail = std::string(ops->name) + " axpy mismatch at length " + std::to_string(len);
          return res;
        }
      ++res.instances;
    }
  }
  if (kernels::available_ops().size() == 1) res.detail = "only the scalar variant is available";
  return res;
}

}  // namespace

std::vector<CheckResult> run_suite(const SuiteOptions& opts) {
  std::vector<CheckResult> out;
  out.push_back(check_qp_oracle(opts));
  out.push_back(check_condensation(opts));
  out.push_back(check_two_link_loop(opts));
  out.push_back(check_kernels(opts));
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed; });
}

}  // namespace tsmpc::verify
