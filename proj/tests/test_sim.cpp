#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tsmpc/error.hpp"
#include "tsmpc/sim.hpp"
#include "tsmpc/verify.hpp"

using namespace tsmpc;
using linalg::Matrix;
using linalg::Vector;
using sim::Scenario;

TEST_CASE("demand draws are constant, bounded, and seed-reproducible") {
  Scenario constant;
  constant.kind = Scenario::Kind::constant;
  constant.rate = 1200.0;
  Rng rng(1);
  for (std::size_t c = 0; c < 10; ++c) CHECK(sim::demand_draw(constant, c, rng) == 1200.0);

  Scenario random;
  random.kind = Scenario::Kind::random_uniform;
  random.lo = 200.0;
  random.hi = 2400.0;
  Rng ra(42), rb(42), rc(43);
  bool any_differs = false;
  for (std::size_t c = 0; c < 100; ++c) {
    const double va = sim::demand_draw(random, c, ra);
    CHECK(va >= 200.0);
    CHECK(va < 2400.0);
    CHECK(sim::demand_draw(random, c, rb) == va);  // same seed, same stream
    any_differs = any_differs || sim::demand_draw(random, c, rc) != va;
  }
  CHECK(any_differs);
}

TEST_CASE("total time spent accumulates queue-cycles") {
  CHECK(sim::compute_tts(Matrix(3, 2), 2, 60.0) == 0.0);
  Matrix q(3, 1);
  q(0, 0) = 10.0;
  q(1, 0) = 10.0;
  q(2, 0) = 123.0;  // final state is not dwelled in
  CHECK(sim::compute_tts(q, 2, 60.0) == doctest::Approx(1200.0));
  CHECK_THROWS_AS((void)sim::compute_tts(q, 4, 60.0), Error);
}

TEST_CASE("rho buckets split at the documented edges") {
  const auto metrics_with_times = [](std::initializer_list<double> times) {
    sim::RunMetrics m;
    for (double t : times) {
      sim::CycleRecord rec;
      rec.solve_time_us = t;
      m.cycles.push_back(rec);
    }
    return m;
  };
  const auto a = metrics_with_times({10, 10, 10, 10});
  CHECK(sim::compare_rho(a, a).better == 1.0);  // rho = 1 counts as "better"

  const auto half = metrics_with_times({5, 5, 5, 5});
  CHECK(sim::compare_rho(half, a).much_better == 1.0);

  const auto mixed = metrics_with_times({4, 8, 12, 20});
  const auto buckets = sim::compare_rho(mixed, a);
  CHECK(buckets.much_better == doctest::Approx(0.25));
  CHECK(buckets.better == doctest::Approx(0.25));
  CHECK(buckets.worse == doctest::Approx(0.25));
  CHECK(buckets.much_worse == doctest::Approx(0.25));
  CHECK(buckets.much_better + buckets.better + buckets.worse + buckets.much_worse ==
        doctest::Approx(1.0));

  CHECK_THROWS_AS((void)sim::compare_rho(a, metrics_with_times({1})), Error);
}

TEST_CASE("an empty horizon produces empty metrics") {
  const auto net = verify::two_link_network();
  sim::RunOptions run;
  run.cfg.horizon = 1;
  run.scenario.horizon_cycles = 0;
  const auto out = sim::run_closed_loop(net, run);
  CHECK(out.metrics.cycles.empty());
  CHECK(out.queues.rows() == 1);
}

TEST_CASE("matched seeds reproduce everything except wall time") {
  const auto net = sfm::load_network("data/toy.net");
  sim::RunOptions run;
  run.strategy = mpc::Strategy::ours;
  run.cfg.horizon = 3;
  run.cfg.n_itr = 5;
  run.scenario.kind = Scenario::Kind::random_uniform;
  run.scenario.horizon_cycles = 12;
  run.scenario.seed = 77;
  const auto a = sim::run_closed_loop(net, run);
  const auto b = sim::run_closed_loop(net, run);
  REQUIRE(a.metrics.cycles.size() == b.metrics.cycles.size());
  for (std::size_t c = 0; c < a.metrics.cycles.size(); ++c) {
    CHECK(a.metrics.cycles[c].changes_total == b.metrics.cycles[c].changes_total);
    CHECK(a.metrics.cycles[c].changes_last_interval ==
          b.metrics.cycles[c].changes_last_interval);
    CHECK(a.metrics.cycles[c].tts_cum == b.metrics.cycles[c].tts_cum);
    CHECK(a.metrics.cycles[c].interval_changes == b.metrics.cycles[c].interval_changes);
  }
  for (std::size_t r = 0; r < a.queues.rows(); ++r)
    for (std::size_t z = 0; z < a.queues.cols(); ++z) CHECK(a.queues(r, z) == b.queues(r, z));

  // metrics files: byte-identical except the solve-time column
  const auto strip_time = [](const sim::RunMetrics& m, mpc::Strategy s) {
    std::ostringstream os;
    sim::write_metrics_csv(os, s, m);
    std::istringstream is(os.str());
    std::string line, out;
    while (std::getline(is, line)) {
      const auto c1 = line.rfind(',');
      const auto c2 = line.rfind(',', c1 == std::string::npos ? c1 : c1 - 1);
      if (c2 != std::string::npos) line.erase(c2, c1 - c2);
      out += line + "\n";
    }
    return out;
  };
  CHECK(strip_time(a.metrics, run.strategy) == strip_time(b.metrics, run.strategy));
}

TEST_CASE("every strategy applies the same green times on matched seeds") {
  const auto net = sfm::load_network("data/toy.net");
  sim::RunOptions run;
  run.cfg.horizon = 3;
  run.cfg.n_itr = 6;
  run.scenario.kind = Scenario::Kind::random_uniform;
  run.scenario.horizon_cycles = 15;
  run.scenario.seed = 5;

  run.strategy = mpc::Strategy::cold;
  const auto cold = sim::run_closed_loop(net, run);
  run.strategy = mpc::Strategy::oass;
  const auto oass = sim::run_closed_loop(net, run);
  run.strategy = mpc::Strategy::ours;
  const auto ours = sim::run_closed_loop(net, run);
  run.stationary_sampling = true;
  const auto ours_stationary = sim::run_closed_loop(net, run);

  for (std::size_t c = 0; c < 15; ++c)
    for (std::size_t i = 0; i < net.n_inputs(); ++i) {
      CHECK(std::abs(cold.greens(c, i) - oass.greens(c, i)) <= 1e-6);
      CHECK(std::abs(cold.greens(c, i) - ours.greens(c, i)) <= 1e-6);
      CHECK(std::abs(cold.greens(c, i) - ours_stationary.greens(c, i)) <= 1e-6);
    }

  // the last interval never works harder than the whole-cycle warm start
  for (std::size_t c = 1; c < 15; ++c) {
    CHECK(ours.metrics.cycles[c].changes_last_interval <=
          oass.metrics.cycles[c].changes_total);
    CHECK(ours.metrics.cycles[c].interval_changes.size() == run.cfg.n_itr);
  }

  // trajectory dump covers every cycle and link with matching queues
  std::ostringstream os;
  sim::write_trajectory_csv(os, net, oass);
  std::size_t lines = 0;
  std::string line;
  std::istringstream is(os.str());
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 2 + 15 * net.n_links());
}

TEST_CASE("the cumulative TTS column matches an independent accumulation") {
  const auto net = verify::two_link_network();
  sim::RunOptions run;
  run.cfg.horizon = 1;
  run.scenario.kind = Scenario::Kind::constant;
  run.scenario.rate = 900.0;
  run.scenario.horizon_cycles = 5;
  run.x0 = {0.0, 0.0};
  const auto out = sim::run_closed_loop(net, run);
  double acc = 0.0;
  for (std::size_t c = 0; c < 5; ++c) {
    for (std::size_t z = 0; z < 2; ++z) acc += net.cycle_time() * out.queues(c, z);
    CHECK(out.metrics.cycles[c].tts_cum == doctest::Approx(acc));
  }
  CHECK(out.metrics.total_tts() == doctest::Approx(sim::compute_tts(out.queues, 5, 60.0)));
}

TEST_CASE("scenario parameters are validated before a run") {
  const auto net = verify::two_link_network();
  sim::RunOptions run;
  run.cfg.horizon = 1;
  run.scenario.kind = Scenario::Kind::random_uniform;
  run.scenario.lo = 500.0;
  run.scenario.hi = 500.0;  // empty interval
  CHECK_THROWS_AS((void)sim::run_closed_loop(net, run), Error);
  run.scenario.kind = Scenario::Kind::constant;
  run.scenario.rate = 0.0;
  CHECK_THROWS_AS((void)sim::run_closed_loop(net, run), Error);
}
