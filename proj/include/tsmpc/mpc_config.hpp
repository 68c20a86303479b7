#pragma once

#include <cstddef>
#include <optional>

#include "tsmpc/linalg.hpp"

namespace tsmpc::mpc {

struct Weights {
  linalg::Matrix q;  // state stage cost
  linalg::Matrix r;  // input stage cost
  linalg::Matrix p;  // terminal state cost
};

struct MpcConfig {
  std::size_t horizon = 3;  // prediction horizon in cycles
  std::size_t n_itr = 1;    // sample intervals per cycle
  double u_min = 5.0;       // green-time bounds, seconds
  double u_max = 55.0;
  std::optional<Weights> weights;                // default_weights(net) when absent
  std::optional<std::size_t> interval_budget;    // working-set changes per intermediate interval
  std::size_t n_itr_ceiling = 60;
};

}  // namespace tsmpc::mpc
