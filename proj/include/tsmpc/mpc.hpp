#pragma once

#include <optional>
#include <string_view>

#include "tsmpc/condense.hpp"
#include "tsmpc/homotopy.hpp"
#include "tsmpc/mpc_config.hpp"
#include "tsmpc/network.hpp"

namespace tsmpc::mpc {

using linalg::Vector;
using sfm::StateSpace;
using sfm::TrafficNetwork;

enum class Strategy { cold, oass, ours };

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from(std::string_view name);

// Sample-interval count from a history of per-cycle active-set-change counts:
// one interval more than the smoothed change estimate, clamped to
// [1, ceiling]. Smoothing is an exponential moving average.
std::size_t choose_intervals(const std::vector<std::size_t>& history, double smoothing = 0.3,
                             std::size_t ceiling = 60);

// Equal split of the cycle budget across each junction's phases, clipped to
// the green-time bounds. Feasible by construction; used when a solve fails.
Vector fallback_plan(const TrafficNetwork& net, const MpcConfig& cfg);

// Rolling-horizon controller over the condensed QP family. classic_cycle is
// the once-per-cycle mode (cold restarts or plain warm starts); interval_tick
// spreads the same work across the cycle and only emits a plan on the last
// interval.
class Controller {
 public:
  Controller(const TrafficNetwork& net, MpcConfig cfg, Strategy strategy);

  const qp::ParametricQp& problem() const { return qp_; }
  const StateSpace& state_space() const { return ss_; }
  const MpcConfig& config() const { return cfg_; }
  Strategy strategy() const { return strategy_; }
  const std::optional<qp::QpSolution>& last_solution() const { return last_; }
  const std::vector<std::size_t>& interval_changes() const { return interval_changes_; }

  struct CycleResult {
    Vector plan;               // first-cycle green times
    std::size_t changes = 0;
    double solve_time_us = 0.0;
    bool fallback = false;
  };
  CycleResult classic_cycle(const Vector& x_measured);

  struct TickResult {
    std::optional<Vector> plan;  // present only on the last interval
    std::size_t changes = 0;
    double solve_time_us = 0.0;
    bool fallback = false;
  };
  TickResult interval_tick(const Vector& x_sampled, std::size_t interval_index);

 private:
  Vector applied_plan(const Vector& primal) const;
  std::size_t solve_into_last(const Vector& x0, bool unlimited_budget);

  const TrafficNetwork* net_;
  MpcConfig cfg_;
  Strategy strategy_;
  StateSpace ss_;
  qp::ParametricQp qp_;
  std::optional<qp::QpSolution> last_;
  std::vector<std::size_t> interval_changes_;  // per interval of the running cycle
};

}  // namespace tsmpc::mpc
