// Acceptance suite: one check per release criterion, one pass/fail line each.
// Usage: tsmpc_acceptance [data_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "tsmpc/homotopy.hpp"
#include "tsmpc/sim.hpp"
#include "tsmpc/verify.hpp"

using namespace tsmpc;
using linalg::Vector;

namespace {

int g_failures = 0;

void report(int index, bool passed, const std::string& what, double seconds, double budget_s) {
  const bool in_budget = seconds < budget_s;
  if (!passed || !in_budget) ++g_failures;
  std::printf("[%s] %d. %s (%.2fs%s)\n", passed && in_budget ? "PASS" : "FAIL", index,
              what.c_str(), seconds, in_budget ? "" : ", over budget");
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------- criterion 1
// hot and cold solves match brute-force enumeration on >= 1000 random QPs
void criterion_oracle_equivalence(double& path_worst, std::size_t& path_breakpoints) {
  Timer timer;
  const std::size_t instances = 1000;
  Rng rng(424242);
  double worst_primal = 0.0, worst_obj = 0.0;
  bool ok = true;
  std::string detail;

  for (std::size_t it = 0; it < instances && ok; ++it) {
    auto inst = verify::random_feasible_qp(rng);
    const auto& problem = inst.qp;
    const auto obj = [&](const Vector& u, const Vector& x) {
      return 0.5 * linalg::quad_form(problem.hessian(), u) +
             linalg::dot(problem.gradient_at(x), u);
    };

    const auto oracle0 = verify::enumerate_optimum(
        problem.hessian(), problem.gradient_at(inst.x0), problem.constraints(),
        problem.bounds_at(inst.x0));
    const auto cold = qp::cold_start(problem, inst.x0);
    const auto oracle1 = verify::enumerate_optimum(
        problem.hessian(), problem.gradient_at(inst.x1), problem.constraints(),
        problem.bounds_at(inst.x1));

    auto hs = qp::begin_homotopy(cold, inst.x1, problem);
    qp::AdvanceOptions opts;
    opts.observer = [&](const qp::HomotopyState& s) {
      path_worst = std::max(path_worst,
                            qp::check_kkt_at(problem, s.solution, s.gradient_now(),
                                             s.bounds_now())
                                .worst());
      ++path_breakpoints;
    };
    qp::advance(hs, problem, opts);

    if (!oracle0.feasible || !oracle1.feasible) {
      ok = false;
      detail = "oracle failed to find an optimum";
      break;
    }
    worst_primal = std::max(
        worst_primal, linalg::inf_norm(linalg::sub(cold.primal, oracle0.primal)));
    worst_primal = std::max(worst_primal, linalg::inf_norm(linalg::sub(hs.solution.primal,
                                                                       oracle1.primal)));
    worst_obj = std::max(worst_obj,
                         std::abs(obj(cold.primal, inst.x0) - obj(oracle0.primal, inst.x0)));
    worst_obj = std::max(
        worst_obj, std::abs(obj(hs.solution.primal, inst.x1) - obj(oracle1.primal, inst.x1)));
  }
  ok = ok && worst_primal <= 1e-7 && worst_obj <= 1e-7;
  report(1, ok,
         "oracle equivalence on " + std::to_string(instances) +
             " random QPs: max primal gap " + fmt(worst_primal) + ", max objective gap " +
             fmt(worst_obj) + (detail.empty() ? "" : "; " + detail),
         timer.seconds(), 60.0);
}

// ---------------------------------------------------------------- criterion 2
// replays closed-loop QP sequences with an instrumented advance
void criterion_path_optimality(const sfm::TrafficNetwork& toy,
                               const sfm::TrafficNetwork& two_link, double path_worst,
                               std::size_t path_breakpoints) {
  Timer timer;
  double worst = path_worst;
  std::size_t breakpoints = path_breakpoints;

  const auto replay = [&](const sfm::TrafficNetwork& net, const mpc::MpcConfig& cfg,
                          const sim::RunOptions& run) {
    const auto ss = sfm::linearize(net);
    const auto problem = sfm::condense(net, ss, cfg);
    const auto traj = sim::run_closed_loop(net, run);
    Vector x(net.n_links());
    for (std::size_t z = 0; z < x.size(); ++z) x[z] = traj.queues(0, z);
    auto sol = qp::cold_start(problem, x);
    for (std::size_t c = 1; c + 1 < traj.queues.rows(); ++c) {
      for (std::size_t z = 0; z < x.size(); ++z) x[z] = traj.queues(c, z);
      auto hs = qp::begin_homotopy(sol, x, problem);
      qp::AdvanceOptions opts;
      opts.observer = [&](const qp::HomotopyState& s) {
        worst = std::max(worst, qp::check_kkt_at(problem, s.solution, s.gradient_now(),
                                                 s.bounds_now())
                                    .worst());
        ++breakpoints;
      };
      if (!qp::advance(hs, problem, opts)) break;
      sol = hs.solution;
    }
  };

  sim::RunOptions toy_run;
  toy_run.strategy = mpc::Strategy::oass;
  toy_run.cfg.horizon = 3;
  toy_run.scenario.kind = sim::Scenario::Kind::random_uniform;
  toy_run.scenario.horizon_cycles = 40;
  toy_run.scenario.seed = 9;
  replay(toy, toy_run.cfg, toy_run);

  sim::RunOptions two_run;
  two_run.strategy = mpc::Strategy::oass;
  two_run.cfg.horizon = 3;
  two_run.scenario.kind = sim::Scenario::Kind::constant;
  two_run.scenario.rate = 1200.0;
  two_run.scenario.horizon_cycles = 3;
  two_run.x0 = {0.0, 0.0};
  replay(two_link, two_run.cfg, two_run);

  report(2, worst <= 1e-8,
         "path optimality at " + std::to_string(breakpoints) +
             " homotopy breakpoints: worst KKT violation " + fmt(worst),
         timer.seconds(), 60.0);
}

// ---------------------------------------------------------------- criterion 3
// the worked two-road system: warm starts against cold restarts, and the
// interval framework's last-interval counts
void criterion_two_link(const sfm::TrafficNetwork& net) {
  Timer timer;
  sim::RunOptions run;
  run.cfg.horizon = 3;
  run.cfg.n_itr = 8;
  run.scenario.kind = sim::Scenario::Kind::constant;
  run.scenario.rate = 1200.0;  // demand is fixed in the network description
  run.scenario.horizon_cycles = 3;
  run.x0 = {0.0, 0.0};

  run.strategy = mpc::Strategy::cold;
  const auto cold = sim::run_closed_loop(net, run);
  run.strategy = mpc::Strategy::oass;
  const auto oass = sim::run_closed_loop(net, run);
  run.strategy = mpc::Strategy::ours;
  const auto ours = sim::run_closed_loop(net, run);

  bool ratio_ok = true, last_ok = true, clean = true;
  std::string cold_counts, hot_counts, last_counts;
  for (std::size_t c = 1; c < run.scenario.horizon_cycles; ++c) {
    const auto nc = cold.metrics.cycles[c].changes_total;
    const auto nh = oass.metrics.cycles[c].changes_total;
    const auto nl = ours.metrics.cycles[c].changes_last_interval;
    cold_counts += (c > 1 ? "," : "") + std::to_string(nc);
    hot_counts += (c > 1 ? "," : "") + std::to_string(nh);
    last_counts += (c > 1 ? "," : "") + std::to_string(nl);
    if (nc < 10 * nh) ratio_ok = false;
    if (nl > 2) last_ok = false;
    clean = clean && !cold.metrics.cycles[c].fallback && !oass.metrics.cycles[c].fallback &&
            !ours.metrics.cycles[c].fallback;
  }
  if (!ratio_ok)
    std::printf("      note: the scratch solve builds the optimal active set directly, so its "
                "count tracks the set size (3-4 here), never 10x a nonzero warm count; the "
                "framework's last-interval counts [%s] do sit 10x under the cold counts\n",
                last_counts.c_str());
  report(3, ratio_ok && last_ok && clean,
         "two-road example: cold [" + cold_counts + "] vs warm [" + hot_counts +
             "] (each >= 10x: " + (ratio_ok ? "yes" : "no") + "), last-interval [" +
             last_counts + "] <= 2: " + (last_ok ? "yes" : "no"),
         timer.seconds(), 5.0);
}

// ---------------------------------------------------------------- criterion 4
void criterion_constant_scenario(const sfm::TrafficNetwork& toy, sim::RunResult& oass_const,
                                 sim::RunResult& ours_const) {
  Timer timer;
  sim::RunOptions run;
  run.cfg.horizon = 3;
  run.cfg.n_itr = 30;
  run.scenario.kind = sim::Scenario::Kind::constant;
  run.scenario.horizon_cycles = 100;
  run.scenario.seed = 1;

  run.strategy = mpc::Strategy::oass;
  oass_const = sim::run_closed_loop(toy, run);
  run.strategy = mpc::Strategy::ours;
  ours_const = sim::run_closed_loop(toy, run);

  std::size_t oass_zero = 0, ours_zero = 0, counted = 0;
  for (std::size_t c = 5; c < 100; ++c) {
    ++counted;
    oass_zero += oass_const.metrics.cycles[c].changes_total == 0;
    ours_zero += ours_const.metrics.cycles[c].changes_last_interval == 0;
  }
  const double fo = static_cast<double>(oass_zero) / static_cast<double>(counted);
  const double fu = static_cast<double>(ours_zero) / static_cast<double>(counted);
  report(4, fo >= 0.7 && fu >= 0.7,
         "constant scenario, zero-change cycles after warmup: warm start " +
             fmt(100 * fo) + "%, interval framework " + fmt(100 * fu) + "% (>= 70%)",
         timer.seconds(), 120.0);
}

// ---------------------------------------------------------------- criterion 5
void criterion_random_ordering(const sfm::TrafficNetwork& toy,
                               const sim::RunResult& oass_const,
                               const sim::RunResult& ours_const) {
  Timer timer;
  sim::RunOptions run;
  run.cfg.horizon = 3;
  run.cfg.n_itr = 30;
  run.scenario.kind = sim::Scenario::Kind::random_uniform;
  run.scenario.horizon_cycles = 100;
  run.scenario.seed = 1;

  run.strategy = mpc::Strategy::cold;
  const auto cold = sim::run_closed_loop(toy, run);
  run.strategy = mpc::Strategy::oass;
  const auto oass = sim::run_closed_loop(toy, run);
  run.strategy = mpc::Strategy::ours;
  const auto ours = sim::run_closed_loop(toy, run);

  double avg_cold = 0, avg_oass = 0, avg_last = 0;
  for (std::size_t c = 0; c < 100; ++c) {
    avg_cold += static_cast<double>(cold.metrics.cycles[c].changes_total);
    avg_oass += static_cast<double>(oass.metrics.cycles[c].changes_total);
    avg_last += static_cast<double>(ours.metrics.cycles[c].changes_last_interval);
  }
  avg_cold /= 100;
  avg_oass /= 100;
  avg_last /= 100;

  const auto rho_random = sim::compare_rho(ours.metrics, oass.metrics);
  const auto rho_constant = sim::compare_rho(ours_const.metrics, oass_const.metrics);

  const bool order_ok = avg_last <= avg_oass && avg_oass <= avg_cold;
  const bool rho_ok = rho_random.much_better > rho_constant.much_better;
  std::printf("      solve times us, random scenario (not gated): cold max/avg %.1f/%.2f, "
              "warm %.1f/%.2f, interval-framework last %.1f/%.2f\n",
              cold.metrics.max_time_us(), cold.metrics.avg_time_us(),
              oass.metrics.max_time_us(), oass.metrics.avg_time_us(),
              ours.metrics.max_time_us(), ours.metrics.avg_time_us());
  report(5, order_ok && rho_ok,
         "random scenario ordering: last-interval " + fmt(avg_last) + " <= warm " +
             fmt(avg_oass) + " <= cold " + fmt(avg_cold) + "; rho<=0.5 share random " +
             fmt(100 * rho_random.much_better) + "% > constant " +
             fmt(100 * rho_constant.much_better) + "%",
         timer.seconds(), 120.0);
}

// ---------------------------------------------------------------- criterion 6
void criterion_strategy_invariance(const sfm::TrafficNetwork& toy) {
  Timer timer;
  sim::RunOptions run;
  run.cfg.horizon = 3;
  run.cfg.n_itr = 12;
  run.scenario.kind = sim::Scenario::Kind::random_uniform;
  run.scenario.horizon_cycles = 60;
  run.scenario.seed = 31;

  run.strategy = mpc::Strategy::cold;
  const auto cold = sim::run_closed_loop(toy, run);
  run.strategy = mpc::Strategy::oass;
  const auto oass = sim::run_closed_loop(toy, run);
  run.strategy = mpc::Strategy::ours;
  run.stationary_sampling = true;
  const auto ours = sim::run_closed_loop(toy, run);

  double gap = 0.0;
  for (std::size_t c = 0; c < 60; ++c)
    for (std::size_t i = 0; i < toy.n_inputs(); ++i) {
      gap = std::max(gap, std::abs(cold.greens(c, i) - oass.greens(c, i)));
      gap = std::max(gap, std::abs(cold.greens(c, i) - ours.greens(c, i)));
    }
  report(6, gap <= 1e-6,
         "strategy invariance: applied plans agree within " + fmt(gap) + " (<= 1e-6)",
         timer.seconds(), 120.0);
}

// ---------------------------------------------------------------- criterion 7
void criterion_condensation() {
  Timer timer;
  Rng rng(777);
  double worst = 0.0;
  bool ok = true;
  const std::size_t instances = 100;
  for (std::size_t it = 0; it < instances && ok; ++it) {
    const auto inst = verify::random_small_mpc(rng);
    const auto ss = sfm::linearize(inst.net);
    const auto problem = sfm::condense(inst.net, ss, inst.cfg);
    const auto sol = qp::cold_start(problem, inst.x0);
    const auto sparse = verify::build_sparse_mpc(inst.net, ss, inst.cfg, inst.x0);
    const auto oracle = verify::enumerate_sparse(sparse);
    if (!oracle.feasible) {
      ok = false;
      break;
    }
    for (std::size_t i = 0; i < sparse.n_inputs_total; ++i)
      worst = std::max(worst, std::abs(sol.primal[i] - oracle.primal[i]));
  }
  ok = ok && worst <= 1e-7;
  report(7, ok,
         "condensation vs joint sparse oracle on " + std::to_string(instances) +
             " networks: max optimizer gap " + fmt(worst),
         timer.seconds(), 60.0);
}

// ---------------------------------------------------------------- criterion 8
void criterion_sizing_rule() {
  Timer timer;
  bool ok = mpc::choose_intervals({0, 0, 0}) == 1;
  ok = ok && mpc::choose_intervals({29}) == 30;
  ok = ok && mpc::choose_intervals({4}) == 5;
  ok = ok && mpc::choose_intervals({10, 10, 10}) == 11;
  ok = ok && mpc::choose_intervals({0, 10}) == 4;   // 0.3-smoothed average 3
  ok = ok && mpc::choose_intervals({100}) == 60;    // ceiling
  report(8, ok, "interval sizing rule reproduces smoothed-count-plus-one exactly",
         timer.seconds(), 5.0);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string data_dir = argc > 1 ? argv[1] : "data";
  const auto toy = sfm::load_network(data_dir + "/toy.net");
  const auto two_link = sfm::load_network(data_dir + "/two_link.net");

  double path_worst = 0.0;
  std::size_t path_breakpoints = 0;
  criterion_oracle_equivalence(path_worst, path_breakpoints);
  criterion_path_optimality(toy, two_link, path_worst, path_breakpoints);
  criterion_two_link(two_link);
  sim::RunResult oass_const, ours_const;
  criterion_constant_scenario(toy, oass_const, ours_const);
  criterion_random_ordering(toy, oass_const, ours_const);
  criterion_strategy_invariance(toy);
  criterion_condensation();
  criterion_sizing_rule();

  if (g_failures > 0) std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
