#include "tsmpc/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "tsmpc/error.hpp"
#include "tsmpc/kernels.hpp"

namespace tsmpc::qp {

using linalg::axpy;
using linalg::matvec;
using linalg::sub;

namespace {

constexpr Tolerances kTol{};
constexpr double kBeginKktTol = 1e-6;

Vector interpolate(const Vector& start, const Vector& delta, double tau) {
  Vector out = start;
  if (!delta.empty()) axpy(tau, delta, out);
  return out;
}

struct RatioPick {
  double ratio = std::numeric_limits<double>::infinity();
  std::size_t row = npos;
};

// Largest tau increment before an inactive row turns violated.
RatioPick primal_ratio(const HomotopyState& hs, const Vector& du, const ParametricQp& qp,
                       const Vector& gu) {
  RatioPick pick;
  const auto& g = qp.constraints();
  const auto& ops = kernels::active();
  for (std::size_t i = 0; i < qp.n_cons(); ++i) {
    if (hs.solution.working_set.is_active(i)) continue;
    const double slope = ops.dot(g.row(i), du.data(), qp.n_vars()) - hs.db[i];
    if (slope >= -kTol.zero_step) continue;  // slack not shrinking
    const double slack = gu[i] - (hs.b_start[i] + hs.tau * hs.db[i]);
    const double ratio = std::max(0.0, slack / (-slope));
    if (ratio < pick.ratio) pick = {ratio, i};
  }
  return pick;
}

// Largest tau increment before an active multiplier turns negative.
RatioPick dual_ratio(const HomotopyState& hs, const Vector& dlambda) {
  RatioPick pick;
  const auto& rows = hs.solution.working_set.active();
  for (std::size_t p = 0; p < rows.size(); ++p) {
    if (dlambda[p] >= -kTol.zero_step) continue;
    const double lam = hs.solution.dual[rows[p]];
    const double ratio = std::max(0.0, lam / (-dlambda[p]));
    if (ratio < pick.ratio || (ratio == pick.ratio && rows[p] < pick.row)) pick = {ratio, rows[p]};
  }
  return pick;
}

StepOutcome pick_step(const HomotopyState& hs, const RatioPick& prim, const RatioPick& dual) {
  const double remaining = 1.0 - hs.tau;
  if (remaining <= prim.ratio && remaining <= dual.ratio)
    return {StepKind::reached, npos, remaining};
  if (dual.ratio <= prim.ratio) return {StepKind::dual_block, dual.row, dual.ratio};
  return {StepKind::primal_block, prim.row, prim.ratio};
}

void apply_step(HomotopyState& hs, const StepDirections& dirs, double tau_step) {
  axpy(tau_step, dirs.du, hs.solution.primal);
  const auto& rows = hs.solution.working_set.active();
  for (std::size_t p = 0; p < rows.size(); ++p)
    hs.solution.dual[rows[p]] += tau_step * dirs.dlambda_active[p];
  hs.tau += tau_step;
  if (hs.parameterized()) {
    hs.solution.param = hs.x0_start;
    axpy(hs.tau, sub(hs.target, hs.x0_start), hs.solution.param);
  }
}

// Exact solve at the segment end with the final working set, replacing the
// accumulated linear updates.
void polish_at_end(HomotopyState& hs, const KktSystem& kkt) {
  const Vector g_end = interpolate(hs.g_start, hs.dg, 1.0);
  const Vector b_end = interpolate(hs.b_start, hs.db, 1.0);
  Vector rhs_b(kkt.n_active());
  for (std::size_t p = 0; p < kkt.n_active(); ++p) rhs_b[p] = b_end[kkt.rows()[p]];
  Vector u, lam;
  kkt.solve(g_end, rhs_b, u, lam);
  hs.solution.primal = std::move(u);
  std::fill(hs.solution.dual.begin(), hs.solution.dual.end(), 0.0);
  for (std::size_t p = 0; p < kkt.n_active(); ++p) hs.solution.dual[kkt.rows()[p]] = lam[p];
  hs.tau = 1.0;
  hs.solution.param = hs.target;
}

// Swap the entering row for an active one when the addition is linearly
// dependent, shifting multiplier mass so stationarity is preserved. Returns
// false when no admissible leaving row exists, which certifies that the
// constraint set beyond the blocking point is infeasible.
bool exchange_dependent(HomotopyState& hs, std::size_t entering, const KktSystem& kkt) {
  const Vector coeff = kkt.dependency_coefficients(entering);
  const auto rows = kkt.rows();
  double best = std::numeric_limits<double>::infinity();
  std::size_t leave = npos;
  for (std::size_t p = 0; p < rows.size(); ++p) {
    if (coeff[p] <= kTol.zero_step) continue;
    const double t = hs.solution.dual[rows[p]] / coeff[p];
    if (t < best || (t == best && rows[p] < leave)) {
      best = t;
      leave = rows[p];
    }
  }
  if (leave == npos) return false;
  for (std::size_t p = 0; p < rows.size(); ++p)
    hs.solution.dual[rows[p]] -= best * coeff[p];
  hs.solution.dual[leave] = 0.0;
  hs.solution.dual[entering] = best;
  hs.solution.working_set.remove(leave);
  hs.solution.working_set.add(entering);
  hs.changes += 2;
  return true;
}

HomotopyState make_raw_state(QpSolution start, Vector target, Vector g_start, Vector b_start,
                             Vector dg, Vector db) {
  HomotopyState hs;
  hs.solution = std::move(start);
  hs.target = std::move(target);
  hs.g_start = std::move(g_start);
  hs.b_start = std::move(b_start);
  hs.dg = std::move(dg);
  hs.db = std::move(db);
  return hs;
}

}  // namespace

Vector HomotopyState::gradient_now() const { return interpolate(g_start, dg, tau); }

Vector HomotopyState::bounds_now() const { return interpolate(b_start, db, tau); }

HomotopyDelta make_delta(const ParametricQp& qp, const Vector& x0_from, const Vector& x0_to) {
  HomotopyDelta d;
  d.dx0 = sub(x0_to, x0_from);
  d.dg = matvec(qp.gradient_sensitivity(), d.dx0);
  d.db = qp.n_cons() > 0 ? matvec(qp.bound_sensitivity(), d.dx0) : Vector{};
  return d;
}

HomotopyState begin_homotopy(const QpSolution& prev, const Vector& x0_new,
                             const ParametricQp& qp) {
  require(x0_new.size() == qp.n_state(), Errc::dimension_mismatch,
          "begin_homotopy: bad target length");
  const KktReport rep = check_kkt(qp, prev);
  if (!rep.within(kBeginKktTol)) {
    char worst[32];
    std::snprintf(worst, sizeof(worst), "%.3g", rep.worst());
    fail(Errc::not_optimal_start,
         std::string("begin_homotopy: start violates KKT conditions (worst ") + worst + ")");
  }
  HomotopyDelta delta = make_delta(qp, prev.param, x0_new);
  HomotopyState hs = make_raw_state(prev, x0_new, qp.gradient_at(prev.param),
                                    qp.bounds_at(prev.param), std::move(delta.dg),
                                    std::move(delta.db));
  hs.x0_start = prev.param;
  return hs;
}

StepDirections step_directions(const HomotopyState& hs, const ParametricQp& qp) {
  KktSystem kkt(qp, hs.solution.working_set);
  Vector rhs_b(kkt.n_active());
  for (std::size_t p = 0; p < kkt.n_active(); ++p) rhs_b[p] = hs.db[kkt.rows()[p]];
  StepDirections dirs;
  kkt.solve(hs.dg, rhs_b, dirs.du, dirs.dlambda_active);
  return dirs;
}

StepOutcome max_step(const HomotopyState& hs, const StepDirections& dirs,
                     const ParametricQp& qp) {
  const Vector gu =
      qp.n_cons() > 0 ? matvec(qp.constraints(), hs.solution.primal) : Vector{};
  return pick_step(hs, primal_ratio(hs, dirs.du, qp, gu), dual_ratio(hs, dirs.dlambda_active));
}

bool advance(HomotopyState& hs, const ParametricQp& qp, const AdvanceOptions& opts) {
  if (hs.tau >= 1.0) return true;
  const std::size_t iter_cap = 10 * (qp.n_cons() + 1);
  const std::size_t zero_cap = qp.n_cons();
  std::size_t iterations = 0;
  std::size_t zero_run = 0;
  std::size_t changes_here = 0;

  auto kkt = std::make_unique<KktSystem>(qp, hs.solution.working_set);
  while (true) {
    require(++iterations <= iter_cap, Errc::iteration_limit,
            "advance: iteration cap exceeded");

    Vector rhs_b(kkt->n_active());
    for (std::size_t p = 0; p < kkt->n_active(); ++p) rhs_b[p] = hs.db[kkt->rows()[p]];
    StepDirections dirs;
    kkt->solve(hs.dg, rhs_b, dirs.du, dirs.dlambda_active);

    const StepOutcome out = max_step(hs, dirs, qp);
    apply_step(hs, dirs, out.tau_step);

    if (out.kind == StepKind::reached) {
      polish_at_end(hs, *kkt);
      if (opts.observer) opts.observer(hs);
      return true;
    }

    zero_run = out.tau_step <= kTol.zero_step ? zero_run + 1 : 0;
    require(zero_run <= zero_cap, Errc::iteration_limit,
            "advance: no progress over " + std::to_string(zero_cap) + " degenerate steps");

    if (out.kind == StepKind::dual_block) {
      hs.solution.dual[out.constraint] = 0.0;
      hs.solution.working_set.remove(out.constraint);
      hs.changes += 1;
      changes_here += 1;
      kkt = std::make_unique<KktSystem>(qp, hs.solution.working_set);
    } else {
      WorkingSet trial = hs.solution.working_set;
      trial.add(out.constraint);
      std::unique_ptr<KktSystem> next;
      try {
        next = std::make_unique<KktSystem>(qp, trial);
      } catch (const Error& e) {
        if (e.code() != Errc::rank_deficient) throw;
      }
      if (next) {
        hs.solution.working_set = std::move(trial);
        hs.solution.dual[out.constraint] = 0.0;
        hs.changes += 1;
        changes_here += 1;
        kkt = std::move(next);
      } else {
        require(exchange_dependent(hs, out.constraint, *kkt), Errc::infeasible,
                "advance: blocking constraint cannot enter the working set; target "
                "constraint system is infeasible");
        changes_here += 2;
        kkt = std::make_unique<KktSystem>(qp, hs.solution.working_set);
      }
    }

    if (opts.observer) opts.observer(hs);
    if (opts.change_budget && changes_here >= *opts.change_budget) return false;
  }
}

HotSolveResult hot_solve(const QpSolution& prev, const Vector& x0_new, const ParametricQp& qp) {
  HomotopyState hs = begin_homotopy(prev, x0_new, qp);
  advance(hs, qp);
  return {std::move(hs.solution), hs.changes};
}

QpSolution cold_start(const ParametricQp& qp, const Vector& x0, SolveStats* stats) {
  const std::size_t n = qp.n_vars();
  const std::size_t m = qp.n_cons();
  const Vector g_target = qp.gradient_at(x0);
  const Vector b_target = qp.bounds_at(x0);

  // auxiliary data optimal at the origin: zero gradient, every row shifted
  // strictly inactive by a unit margin
  QpSolution start;
  start.primal = Vector(n, 0.0);
  start.dual = Vector(m, 0.0);
  start.working_set = WorkingSet(m);

  Vector dg = g_target;  // g_target - 0
  Vector db(m);
  for (std::size_t i = 0; i < m; ++i) db[i] = b_target[i] + 1.0;

  HomotopyState hs = make_raw_state(std::move(start), x0, Vector(n, 0.0), Vector(m, -1.0),
                                    std::move(dg), std::move(db));
  advance(hs, qp);
  if (stats) stats->working_set_changes = hs.changes;
  hs.solution.param = x0;
  return std::move(hs.solution);
}

}  // namespace tsmpc::qp
