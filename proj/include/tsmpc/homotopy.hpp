#pragma once

#include <functional>
#include <optional>

#include "tsmpc/qp.hpp"

namespace tsmpc::qp {

// Parameter-space difference between two members of the QP family:
// dg = F dx0 and db = E dx0 by construction.
struct HomotopyDelta {
  Vector dx0;
  Vector dg;
  Vector db;
};

HomotopyDelta make_delta(const ParametricQp& qp, const Vector& x0_from, const Vector& x0_to);

enum class StepKind { reached, primal_block, dual_block };

struct StepOutcome {
  StepKind kind = StepKind::reached;
  std::size_t constraint = npos;  // blocking row for primal/dual blocks
  double tau_step = 0.0;
};

// Solver state while moving along the straight segment between a solved QP
// and its successor. `solution` stays optimal for the interpolated data at
// every accepted tau, which is what makes interruption safe.
struct HomotopyState {
  QpSolution solution;
  double tau = 0.0;
  Vector target;            // parameter the segment ends at
  std::size_t changes = 0;  // working-set modifications so far

  // segment endpoints in gradient/bound space
  Vector g_start, b_start;
  Vector dg, db;
  Vector x0_start;          // empty for auxiliary (non-parameter) segments

  Vector gradient_now() const;  // g_start + tau*dg
  Vector bounds_now() const;    // b_start + tau*db
  bool parameterized() const { return !x0_start.empty(); }
};

// Starts a homotopy from an optimal solution towards QP(x0_new).
// The start must satisfy the KKT conditions at its own parameter.
HomotopyState begin_homotopy(const QpSolution& prev, const Vector& x0_new,
                             const ParametricQp& qp);

struct StepDirections {
  Vector du;              // per unit tau
  Vector dlambda_active;  // ordered like the working set
};

StepDirections step_directions(const HomotopyState& hs, const ParametricQp& qp);

// Longest admissible step from hs.tau given the directions: the first
// inactive row that would turn violated, the first active multiplier that
// would turn negative, or the end of the segment. Ties prefer the dual
// block, then the lowest constraint index.
StepOutcome max_step(const HomotopyState& hs, const StepDirections& dirs,
                     const ParametricQp& qp);

using BreakpointObserver = std::function<void(const HomotopyState&)>;

struct AdvanceOptions {
  std::optional<std::size_t> change_budget;  // working-set changes per call
  BreakpointObserver observer;               // called after every accepted step
};

// Iterates direction/step/update until the segment end or the change budget.
// Returns true when the target was reached; a false return leaves a state
// whose solution is optimal for the interpolated parameter and can seed the
// next homotopy.
bool advance(HomotopyState& hs, const ParametricQp& qp, const AdvanceOptions& opts = {});

struct HotSolveResult {
  QpSolution solution;
  std::size_t changes = 0;
};

// begin_homotopy + advance with unlimited budget.
HotSolveResult hot_solve(const QpSolution& prev, const Vector& x0_new, const ParametricQp& qp);

}  // namespace tsmpc::qp
