#include "tsmpc/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "tsmpc/error.hpp"

namespace tsmpc::mpc {

namespace {

double elapsed_us(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::cold: return "cold";
    case Strategy::oass: return "oass";
    case Strategy::ours: return "ours";
  }
  return "?";
}

std::optional<Strategy> strategy_from(std::string_view name) {
  if (name == "cold") return Strategy::cold;
  if (name == "oass") return Strategy::oass;
  if (name == "ours") return Strategy::ours;
  return std::nullopt;
}

std::size_t choose_intervals(const std::vector<std::size_t>& history, double smoothing,
                             std::size_t ceiling) {
  require(!history.empty(), Errc::dimension_mismatch, "choose_intervals: empty history");
  double ema = static_cast<double>(history.front());
  for (std::size_t i = 1; i < history.size(); ++i)
    ema = smoothing * static_cast<double>(history[i]) + (1.0 - smoothing) * ema;
  const auto n_a = static_cast<std::size_t>(std::llround(ema));
  return std::clamp<std::size_t>(n_a + 1, 1, std::max<std::size_t>(ceiling, 1));
}

Vector fallback_plan(const TrafficNetwork& net, const MpcConfig& cfg) {
  Vector u(net.n_inputs(), 0.0);
  for (std::size_t j = 0; j < net.n_junctions(); ++j) {
    const auto& junction = net.junction(j);
    const double equal =
        (net.cycle_time() - junction.lost_time) / static_cast<double>(junction.phases.size());
    const double g = std::clamp(equal, cfg.u_min, cfg.u_max);
    for (std::size_t i = 0; i < junction.phases.size(); ++i) u[net.input_index(j, i)] = g;
  }
  return u;
}

Controller::Controller(const TrafficNetwork& net, MpcConfig cfg, Strategy strategy)
    : net_(&net), cfg_(std::move(cfg)), strategy_(strategy), ss_(linearize(net)),
      qp_(sfm::condense(net, ss_, cfg_)) {
  require(cfg_.u_min >= 0 && cfg_.u_min <= cfg_.u_max, Errc::constraint_violation,
          "green-time bounds empty");
  require(cfg_.n_itr >= 1, Errc::constraint_violation, "n_itr must be >= 1");
  for (const auto& junction : net.junctions())
    require(junction.phases.size() * cfg_.u_min + junction.lost_time <=
                net.cycle_time() + 1e-9,
            Errc::constraint_violation,
            "junction " + junction.id + ": minimum greens do not fit in the cycle");
}

Vector Controller::applied_plan(const Vector& primal) const {
  const std::size_t p = net_->n_inputs();
  Vector u(primal.begin(), primal.begin() + p);
  for (auto& g : u) g = std::clamp(g, cfg_.u_min, cfg_.u_max);
  // squeeze out solver-tolerance overshoot of the cycle budget
  for (std::size_t j = 0; j < net_->n_junctions(); ++j) {
    const auto& junction = net_->junction(j);
    const double limit = net_->cycle_time() - junction.lost_time;
    double total = 0.0;
    for (std::size_t i = 0; i < junction.phases.size(); ++i)
      total += u[net_->input_index(j, i)];
    if (total > limit) {
      require(total <= limit + 1e-6, Errc::constraint_violation,
              "applied plan violates the cycle budget at junction " + junction.id);
      const double scale = limit / total;
      for (std::size_t i = 0; i < junction.phases.size(); ++i)
        u[net_->input_index(j, i)] *= scale;
    }
  }
  return u;
}

std::size_t Controller::solve_into_last(const Vector& x0, bool unlimited_budget) {
  if (!last_) {
    qp::SolveStats stats;
    last_ = qp::cold_start(qp_, x0, &stats);
    return stats.working_set_changes;
  }
  qp::HomotopyState hs = [&] {
    try {
      return qp::begin_homotopy(*last_, x0, qp_);
    } catch (const Error& e) {
      if (e.code() != Errc::not_optimal_start) throw;
      // drifted start; rebuild it from scratch and restate the homotopy
      last_ = qp::cold_start(qp_, last_->param);
      return qp::begin_homotopy(*last_, x0, qp_);
    }
  }();
  qp::AdvanceOptions opts;
  if (!unlimited_budget && cfg_.interval_budget) opts.change_budget = cfg_.interval_budget;
  qp::advance(hs, qp_, opts);
  last_ = std::move(hs.solution);
  return hs.changes;
}

Controller::CycleResult Controller::classic_cycle(const Vector& x_measured) {
  require(x_measured.size() == net_->n_links(), Errc::dimension_mismatch,
          "classic_cycle: state length");
  const auto t0 = std::chrono::steady_clock::now();
  CycleResult res;
  try {
    if (strategy_ == Strategy::cold) last_.reset();
    res.changes = solve_into_last(x_measured, true);
    res.plan = applied_plan(last_->primal);
  } catch (const Error& e) {
    if (e.code() != Errc::infeasible && e.code() != Errc::iteration_limit) throw;
    res.plan = fallback_plan(*net_, cfg_);
    res.fallback = true;
  }
  res.solve_time_us = elapsed_us(t0);
  return res;
}

Controller::TickResult Controller::interval_tick(const Vector& x_sampled,
                                                 std::size_t interval_index) {
  require(interval_index >= 1 && interval_index <= cfg_.n_itr, Errc::dimension_mismatch,
          "interval_tick: interval index outside 1..n_itr");
  require(x_sampled.size() == net_->n_links(), Errc::dimension_mismatch,
          "interval_tick: state length");
  if (interval_index == 1) interval_changes_.clear();

  const bool last_interval = interval_index == cfg_.n_itr;
  const auto t0 = std::chrono::steady_clock::now();
  TickResult res;
  try {
    res.changes = solve_into_last(x_sampled, last_interval);
    if (last_interval) res.plan = applied_plan(last_->primal);
  } catch (const Error& e) {
    if (e.code() != Errc::infeasible && e.code() != Errc::iteration_limit) throw;
    // an unfinished intermediate state stays a valid start for the next tick
    if (last_interval) {
      res.plan = fallback_plan(*net_, cfg_);
      res.fallback = true;
    }
  }
  res.solve_time_us = elapsed_us(t0);
  interval_changes_.push_back(res.changes);
  return res;
}

}  // namespace tsmpc::mpc
