#pragma once

#include <cstdint>
#include <iosfwd>

#include "tsmpc/mpc.hpp"
#include "tsmpc/rng.hpp"

namespace tsmpc::sim {

using linalg::Matrix;
using linalg::Vector;
using sfm::TrafficNetwork;

struct Scenario {
  enum class Kind { constant, random_uniform };
  Kind kind = Kind::constant;
  double rate = 1200.0;  // veh/h, constant kind
  double lo = 200.0;     // veh/h bounds, random kind
  double hi = 2400.0;
  std::size_t horizon_cycles = 100;
  std::uint64_t seed = 1;
};

const char* scenario_kind_name(Scenario::Kind k);

// Source inflow for one cycle, veh/h. Random draws are uniform, held for the
// cycle, and consumed from rng in cycle order.
double demand_draw(const Scenario& scenario, std::size_t cycle, Rng& rng);

struct CycleRecord {
  std::size_t cycle = 0;
  std::size_t changes_total = 0;
  std::size_t changes_last_interval = 0;
  double solve_time_us = 0.0;
  double tts_cum = 0.0;
  bool fallback = false;
  std::vector<std::size_t> interval_changes;  // per-interval detail, ours only
};

struct RunMetrics {
  std::vector<CycleRecord> cycles;

  double max_time_us() const;
  double avg_time_us() const;
  double total_tts() const;
};

struct RunResult {
  RunMetrics metrics;
  Matrix queues;  // (cycles+1) x n_links, row c = state entering cycle c
  Matrix greens;  // cycles x n_inputs, row c = plan applied during cycle c
};

struct RunOptions {
  mpc::Strategy strategy = mpc::Strategy::oass;
  Scenario scenario;
  mpc::MpcConfig cfg;
  Vector x0;                        // initial queues; zeros when empty
  bool stationary_sampling = false; // feed every interval the cycle-end state
};

// Closed loop: draw demand, let the controller produce each cycle's plan
// (once per cycle, or spread over sample intervals for `ours`), step the
// plant, log metrics. Deterministic for a fixed seed apart from wall times.
RunResult run_closed_loop(const TrafficNetwork& net, const RunOptions& opts);

// Total time spent: cycle_time * sum of queue rows 0..cycles-1.
double compute_tts(const Matrix& queues, std::size_t cycles, double cycle_time);

struct RhoBuckets {
  double much_better = 0.0;  // rho <= 0.5
  double better = 0.0;       // 0.5 < rho <= 1
  double worse = 0.0;        // 1 < rho <= 1.5
  double much_worse = 0.0;   // rho > 1.5
};

// Per-cycle solve-time ratio ours/oass, bucketed.
RhoBuckets compare_rho(const RunMetrics& ours, const RunMetrics& oass);

void write_metrics_csv(std::ostream& out, mpc::Strategy strategy, const RunMetrics& metrics);
void write_trajectory_csv(std::ostream& out, const TrafficNetwork& net, const RunResult& run);

}  // namespace tsmpc::sim
