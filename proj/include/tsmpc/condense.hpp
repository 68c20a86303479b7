#pragma once

#include "tsmpc/mpc_config.hpp"
#include "tsmpc/network.hpp"
#include "tsmpc/qp.hpp"

namespace tsmpc::sfm {

// Q = diag(1/capacity) normalizes queues by link size, R = 0.01 I keeps the
// control penalty small against it, P reuses Q for the terminal stage.
mpc::Weights default_weights(const TrafficNetwork& net);

// Stacked prediction over horizon N: X = gamma x0 + omega U + phi with
// X = [x_1; ...; x_N] and U = [u_0; ...; u_{N-1}].
struct Prediction {
  Matrix gamma;
  Matrix omega;
  Vector phi;
};

Prediction stack_prediction(const StateSpace& ss, std::size_t horizon);

// Eliminates the predicted states from the N-step problem, producing the QP
// family min 1/2 U^T H U + U^T g(x0) s.t. G U >= b(x0). The known per-cycle
// offset e is folded into g_c and W. Constraint rows are laid out as, per
// step k = 0..N-1: input lower bounds (p rows), input upper bounds (p rows),
// junction cycle budgets (J rows); then per step k = 1..N: link state lower
// bounds, then upper bounds, in link order, only for links declaring them.
qp::ParametricQp condense(const TrafficNetwork& net, const StateSpace& ss,
                          const mpc::MpcConfig& cfg);

}  // namespace tsmpc::sfm
