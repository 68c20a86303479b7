#include "tsmpc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "tsmpc/error.hpp"

namespace tsmpc::sim {

using mpc::Controller;
using mpc::Strategy;
using sfm::TrafficNetwork;

const char* scenario_kind_name(Scenario::Kind k) {
  return k == Scenario::Kind::constant ? "constant" : "random";
}

double demand_draw(const Scenario& scenario, std::size_t cycle, Rng& rng) {
  (void)cycle;
  if (scenario.kind == Scenario::Kind::constant) return scenario.rate;
  return rng.uniform(scenario.lo, scenario.hi);
}

double RunMetrics::max_time_us() const {
  double m = 0.0;
  for (const auto& c : cycles) m = std::max(m, c.solve_time_us);
  return m;
}

double RunMetrics::avg_time_us() const {
  if (cycles.empty()) return 0.0;
  double s = 0.0;
  for (const auto& c : cycles) s += c.solve_time_us;
  return s / static_cast<double>(cycles.size());
}

double RunMetrics::total_tts() const { return cycles.empty() ? 0.0 : cycles.back().tts_cum; }

double compute_tts(const Matrix& queues, std::size_t cycles, double cycle_time) {
  require(cycles <= queues.rows(), Errc::dimension_mismatch,
          "compute_tts: more cycles than trajectory rows");
  double total = 0.0;
  for (std::size_t c = 0; c < cycles; ++c)
    for (std::size_t z = 0; z < queues.cols(); ++z) total += cycle_time * queues(c, z);
  return total;
}

RunResult run_closed_loop(const TrafficNetwork& net, const RunOptions& opts) {
  const std::size_t n = net.n_links();
  const std::size_t p = net.n_inputs();
  const std::size_t cycles = opts.scenario.horizon_cycles;
  require(opts.scenario.kind == Scenario::Kind::constant || opts.scenario.lo < opts.scenario.hi,
          Errc::constraint_violation, "random scenario needs lo < hi");
  require(opts.scenario.kind == Scenario::Kind::random_uniform || opts.scenario.rate > 0,
          Errc::constraint_violation, "constant scenario needs a positive rate");

  Vector x = opts.x0.empty() ? Vector(n, 0.0) : opts.x0;
  require(x.size() == n, Errc::dimension_mismatch, "run_closed_loop: x0 length");

  RunResult out;
  out.queues = Matrix(cycles + 1, n);
  out.greens = Matrix(cycles, p);
  for (std::size_t z = 0; z < n; ++z) out.queues(0, z) = x[z];
  if (cycles == 0) return out;

  Controller ctrl(net, opts.cfg, opts.strategy);
  Rng rng(opts.scenario.seed);
  out.metrics.cycles.resize(cycles);

  Vector plan;
  double tts_acc = 0.0;
  for (std::size_t c = 0; c < cycles; ++c) {
    const double rate_vph = demand_draw(opts.scenario, c, rng);
    Vector extra(n);
    for (std::size_t z = 0; z < n; ++z) extra[z] = rate_vph / 3600.0 * net.source_share()[z];

    if (c == 0) {
      // every strategy bootstraps its first plan from scratch
      const auto res = ctrl.classic_cycle(x);
      auto& rec = out.metrics.cycles[0];
      rec.cycle = 0;
      rec.changes_total = rec.changes_last_interval = res.changes;
      rec.solve_time_us = res.solve_time_us;
      rec.fallback = res.fallback;
      plan = res.plan;
    }

    for (std::size_t i = 0; i < p; ++i) out.greens(c, i) = plan[i];
    for (std::size_t z = 0; z < n; ++z) tts_acc += net.cycle_time() * x[z];
    out.metrics.cycles[c].tts_cum = tts_acc;

    const Vector delta = sfm::flow_delta(net, plan, extra);
    Vector x_next = x;
    for (std::size_t z = 0; z < n; ++z)
      x_next[z] = std::clamp(x[z] + delta[z], 0.0, net.link(z).capacity);

    if (c + 1 < cycles) {
      auto& rec = out.metrics.cycles[c + 1];
      rec.cycle = c + 1;
      if (opts.strategy == Strategy::ours) {
        // work is spread across the running cycle; only the last interval's
        // sample (the upcoming measurement) yields the applied plan
        const std::size_t n_itr = opts.cfg.n_itr;
        for (std::size_t i = 1; i <= n_itr; ++i) {
          Vector sample;
          if (opts.stationary_sampling || i == n_itr) {
            sample = x_next;
          } else {
            const double frac = static_cast<double>(i) / static_cast<double>(n_itr);
            sample = x;
            for (std::size_t z = 0; z < n; ++z)
              sample[z] = std::clamp(x[z] + frac * delta[z], 0.0, net.link(z).capacity);
          }
          const auto tick = ctrl.interval_tick(sample, i);
          rec.changes_total += tick.changes;
          rec.interval_changes.push_back(tick.changes);
          if (i == n_itr) {
            rec.changes_last_interval = tick.changes;
            rec.solve_time_us = tick.solve_time_us;
            rec.fallback = tick.fallback;
            plan = *tick.plan;
          }
        }
      } else {
        const auto res = ctrl.classic_cycle(x_next);
        rec.changes_total = rec.changes_last_interval = res.changes;
        rec.solve_time_us = res.solve_time_us;
        rec.fallback = res.fallback;
        plan = res.plan;
      }
    }

    x = std::move(x_next);
    for (std::size_t z = 0; z < n; ++z) out.queues(c + 1, z) = x[z];
  }
  return out;
}

RhoBuckets compare_rho(const RunMetrics& ours, const RunMetrics& oass) {
  require(ours.cycles.size() == oass.cycles.size(), Errc::length_mismatch,
          "compare_rho: cycle counts differ");
  RhoBuckets buckets;
  if (ours.cycles.empty()) return buckets;
  const double denom_floor = 1e-3;  // us; steady-clock reads are never this fast
  for (std::size_t c = 0; c < ours.cycles.size(); ++c) {
    const double rho = ours.cycles[c].solve_time_us /
                       std::max(oass.cycles[c].solve_time_us, denom_floor);
    if (rho <= 0.5) buckets.much_better += 1.0;
    else if (rho <= 1.0) buckets.better += 1.0;
    else if (rho <= 1.5) buckets.worse += 1.0;
    else buckets.much_worse += 1.0;
  }
  const auto total = static_cast<double>(ours.cycles.size());
  buckets.much_better /= total;
  buckets.better /= total;
  buckets.worse /= total;
  buckets.much_worse /= total;
  return buckets;
}

namespace {

void print_num(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  out << buf;
}

}  // namespace

void write_metrics_csv(std::ostream& out, Strategy strategy, const RunMetrics& metrics) {
  out << "# tsmpc-metrics v1\n";
  out << "cycle,strategy,changes_total,changes_last_interval,solve_time_us,tts_cum\n";
  for (const auto& rec : metrics.cycles) {
    out << rec.cycle << ',' << mpc::strategy_name(strategy) << ',' << rec.changes_total << ','
        << rec.changes_last_interval << ',';
    print_num(out, rec.solve_time_us);
    out << ',';
    print_num(out, rec.tts_cum);
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const TrafficNetwork& net, const RunResult& run) {
  out << "# tsmpc-trajectory v1\n";
  out << "cycle,link,queue,green\n";
  for (std::size_t c = 0; c < run.greens.rows(); ++c) {
    Vector u(run.greens.cols());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = run.greens(c, i);
    for (std::size_t z = 0; z < net.n_links(); ++z) {
      out << c << ',' << net.link(z).id << ',';
      print_num(out, run.queues(c, z));
      out << ',';
      print_num(out, green_time_of_link(net, net.link(z).downstream_junction, z, u));
      out << '\n';
    }
  }
}

}  // namespace tsmpc::sim
