#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tsmpc/error.hpp"
#include "tsmpc/mpc.hpp"
#include "tsmpc/verify.hpp"

using namespace tsmpc;
using linalg::Vector;
using mpc::Controller;
using mpc::MpcConfig;
using mpc::Strategy;

namespace {

sfm::TrafficNetwork tiny(const std::string& junctions) {
  std::istringstream in("[meta]\ncycle_time=60\n[links]\nA capacity=10 saturation=720\nB "
                        "capacity=10 saturation=720\nC capacity=10 saturation=720\n"
                        "[junctions]\n" + junctions + "\n");
  return sfm::parse_network(in, "tiny");
}

}  // namespace

TEST_CASE("interval sizing follows the smoothed change estimate plus one") {
  CHECK(mpc::choose_intervals({0, 0, 0}) == 1);
  CHECK(mpc::choose_intervals({29}) == 30);
  CHECK(mpc::choose_intervals({4}) == 5);
  // EMA with smoothing 0.3: 0 -> 3 after one step of 10, rounded
  CHECK(mpc::choose_intervals({0, 10}) == 4);
  CHECK(mpc::choose_intervals({100}) == 60);           // default ceiling
  CHECK(mpc::choose_intervals({100}, 0.3, 80) == 80);  // configurable ceiling
  CHECK_THROWS_AS((void)mpc::choose_intervals({}), Error);
}

TEST_CASE("fallback plan splits each junction's budget equally and clips") {
  MpcConfig cfg;  // u in [5, 55]

  // two phases, no lost time: 30/30
  const auto net2 = verify::two_link_network();
  CHECK(mpc::fallback_plan(net2, cfg) == Vector{30, 30});

  // one phase, lost 5, cycle 60: clipped at u_max = 55
  const auto net1 = tiny("J lost=5 A+B+C");
  CHECK(mpc::fallback_plan(net1, cfg) == Vector{55});

  // three phases, cycle 55, lost 4: (55-4)/3 = 17 each
  std::istringstream in("[meta]\ncycle_time=55\n[links]\nA capacity=10 saturation=720\nB "
                        "capacity=10 saturation=720\nC capacity=10 saturation=720\n"
                        "[junctions]\nJ lost=4 A B C\n");
  const auto net3 = sfm::parse_network(in, "three-phase");
  CHECK(mpc::fallback_plan(net3, cfg) == Vector{17, 17, 17});
}

TEST_CASE("controller constructor rejects a cycle the minimum greens cannot fit") {
  MpcConfig cfg;
  cfg.u_min = 25.0;  // 3 phases * 25 + 4 > 55
  std::istringstream in("[meta]\ncycle_time=55\n[links]\nA capacity=10 saturation=720\nB "
                        "capacity=10 saturation=720\nC capacity=10 saturation=720\n"
                        "[junctions]\nJ lost=4 A B C\n");
  const auto net = sfm::parse_network(in, "tight");
  CHECK_THROWS_AS(Controller(net, cfg, Strategy::oass), Error);
}

TEST_CASE("classic cycles warm start and settle to zero changes at a fixed state") {
  const auto net = verify::two_link_network();
  MpcConfig cfg;
  cfg.horizon = 1;
  Controller ctrl(net, cfg, Strategy::oass);
  const Vector x{40, 40};
  const auto first = ctrl.classic_cycle(x);
  CHECK_FALSE(first.fallback);
  const auto again = ctrl.classic_cycle(x);
  CHECK(again.changes == 0);
  CHECK(linalg::inf_norm(linalg::sub(again.plan, first.plan)) <= 1e-9);

  // every applied plan satisfies the cycle budget and the green-time box
  for (const auto& res : {first, again}) {
    CHECK(res.plan[0] + res.plan[1] <= net.cycle_time() + 1e-9);
    for (double g : res.plan) {
      CHECK(g >= cfg.u_min - 1e-9);
      CHECK(g <= cfg.u_max + 1e-9);
    }
  }
}

TEST_CASE("cold strategy repeats the full solve while oass reuses it") {
  const auto net = verify::two_link_network();
  MpcConfig cfg;
  cfg.horizon = 1;
  Controller cold(net, cfg, Strategy::cold);
  Controller oass(net, cfg, Strategy::oass);
  const Vector xa{20, 20}, xb{26, 25};
  const auto c1 = cold.classic_cycle(xa);
  const auto o1 = oass.classic_cycle(xa);
  CHECK(c1.changes == o1.changes);  // both bootstrap from scratch
  const auto c2 = cold.classic_cycle(xb);
  const auto o2 = oass.classic_cycle(xb);
  CHECK(linalg::inf_norm(linalg::sub(c2.plan, o2.plan)) <= 1e-7);
  CHECK(o2.changes <= c2.changes);
}

TEST_CASE("an infeasible measurement falls back to the equal split") {
  const auto net = verify::two_link_network();
  MpcConfig cfg;
  cfg.horizon = 3;  // long horizon is infeasible from congested states
  Controller ctrl(net, cfg, Strategy::oass);
  const auto res = ctrl.classic_cycle(Vector{140, 110});
  CHECK(res.fallback);
  CHECK(res.plan == Vector{30, 30});
}

TEST_CASE("interval ticks only emit a plan on the last interval") {
  const auto net = verify::two_link_network();
  MpcConfig cfg;
  cfg.horizon = 1;
  cfg.n_itr = 4;
  Controller ctrl(net, cfg, Strategy::ours);
  const Vector x0{10, 10}, x1{34, 33};

  CHECK_FALSE(ctrl.interval_tick(x0, 1).plan.has_value());  // bootstraps internally
  for (std::size_t i = 2; i < 4; ++i) CHECK_FALSE(ctrl.interval_tick(x1, i).plan.has_value());
  const auto last = ctrl.interval_tick(x1, 4);
  REQUIRE(last.plan.has_value());
  CHECK(ctrl.interval_changes().size() == 4);

  // stationary samples: earlier intervals already did all the work
  CHECK(last.changes == 0);

  // the emitted plan equals a one-shot warm solve to the same state
  Controller ref(net, cfg, Strategy::oass);
  (void)ref.classic_cycle(x0);
  const auto direct = ref.classic_cycle(x1);
  CHECK(linalg::inf_norm(linalg::sub(*last.plan, direct.plan)) <= 1e-7);

  CHECK_THROWS_AS((void)ctrl.interval_tick(x1, 0), Error);
  CHECK_THROWS_AS((void)ctrl.interval_tick(x1, 5), Error);
}

TEST_CASE("a per-interval change budget spreads the work without losing the target") {
  const auto net = verify::two_link_network();
  MpcConfig cfg;
  cfg.horizon = 3;
  cfg.n_itr = 6;
  cfg.interval_budget = 1;
  Controller ctrl(net, cfg, Strategy::ours);

  const Vector x0{0, 0};
  (void)ctrl.interval_tick(x0, 1);
  const Vector x1{25, 24};
  std::optional<Vector> plan;
  for (std::size_t i = 2; i <= 6; ++i) {
    const auto tick = ctrl.interval_tick(x1, i);
    if (i < 6) {
      // intermediate ticks stop at the budget (an exchange counts as two)
      CHECK(tick.changes <= 2);
      CHECK_FALSE(tick.plan.has_value());
    } else {
      plan = tick.plan;
    }
  }
  REQUIRE(plan.has_value());
  Controller ref(net, cfg, Strategy::oass);
  (void)ref.classic_cycle(x0);
  const auto direct = ref.classic_cycle(x1);
  CHECK(linalg::inf_norm(linalg::sub(*plan, direct.plan)) <= 1e-7);
}
