#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tsmpc/error.hpp"
#include "tsmpc/experiment.hpp"

using namespace tsmpc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("tsmpc_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("spec files parse with paths relative to the spec location") {
  const auto spec = cli::parse_spec_file("data/toy.spec");
  CHECK(spec.network_file == fs::path("data") / "toy.net");
  CHECK(spec.cycles == 100);
  CHECK(spec.cfg.horizon == 3);
  CHECK(spec.cfg.n_itr == 30);
  CHECK(spec.cfg.u_min == 5.0);
  CHECK(spec.cfg.u_max == 55.0);
  CHECK_FALSE(spec.cfg.interval_budget.has_value());
  CHECK(spec.strategies.size() == 3);
  CHECK(spec.scenario_kinds.size() == 2);
  CHECK(spec.seed == 1);

  const auto sc = cli::make_scenario(spec, sim::Scenario::Kind::random_uniform);
  CHECK(sc.lo == 200.0);
  CHECK(sc.hi == 2400.0);
  CHECK(sc.horizon_cycles == 100);

  const auto two = cli::parse_spec_file("data/two_link.spec");
  REQUIRE(two.x0.size() == 2);
  CHECK(two.x0[0] == 0.0);
}

TEST_CASE("spec parsing rejects missing files and bad lists") {
  TempDir tmp;
  CHECK_THROWS_AS((void)cli::parse_spec_file(tmp.path / "nope.spec"), Error);

  write(tmp.path / "no_net.spec", "[scenario]\ncycles = 3\n");
  CHECK_THROWS_AS((void)cli::parse_spec_file(tmp.path / "no_net.spec"), Error);

  write(tmp.path / "bad_strategy.spec",
        "[network]\nfile = x.net\n[run]\nstrategies = warmish\n");
  CHECK_THROWS_AS((void)cli::parse_spec_file(tmp.path / "bad_strategy.spec"), Error);
}

TEST_CASE("cmd_run writes one metrics and trajectory file per combination") {
  TempDir tmp;
  auto spec = cli::parse_spec_file("data/toy.spec");
  spec.cycles = 4;
  spec.cfg.n_itr = 3;
  spec.out_dir = tmp.path / "out";
  spec.jobs = 3;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_run(spec, out, err) == 0);
  std::size_t metrics = 0, trajectories = 0;
  for (const auto& entry : fs::directory_iterator(spec.out_dir)) {
    const auto name = entry.path().filename().string();
    metrics += name.rfind("metrics_", 0) == 0;
    trajectories += name.rfind("trajectory_", 0) == 0;
  }
  CHECK(metrics == 6);  // 2 scenarios x 3 strategies
  CHECK(trajectories == 6);
  CHECK(out.str().find("MPC-oass") != std::string::npos);
  CHECK(out.str().find("MPC-ours") != std::string::npos);

  // a missing network file fails with the path in the message
  spec.network_file = tmp.path / "ghost.net";
  std::ostringstream out2, err2;
  CHECK(cli::cmd_run(spec, out2, err2) == 1);
  CHECK(err2.str().find("ghost.net") != std::string::npos);
}

TEST_CASE("a one-interval sweep row behaves exactly like the warm-start mode") {
  TempDir tmp;
  auto spec = cli::parse_spec_file("data/toy.spec");
  spec.cycles = 6;
  spec.out_dir = tmp.path / "out";
  spec.scenario_kinds = {sim::Scenario::Kind::constant};
  std::ostringstream out, err;
  REQUIRE(cli::cmd_sweep(spec, 1, 1, out, err) == 0);
  REQUIRE(fs::exists(spec.out_dir / "sweep.csv"));

  // with n_itr = 1 the single interval is the whole warm-started solve
  std::ifstream in(spec.out_dir / "sweep.csv");
  std::string line;
  std::getline(in, line);  // version header
  std::getline(in, line);  // column header
  std::getline(in, line);
  double n = 0, last = 0, total = 0;
  std::sscanf(line.c_str(), "%lf,%lf,%lf", &n, &last, &total);
  CHECK(n == 1);
  CHECK(last == total);

  const auto net = sfm::load_network(spec.network_file);
  sim::RunOptions run;
  run.strategy = mpc::Strategy::oass;
  run.scenario = cli::make_scenario(spec, sim::Scenario::Kind::constant);
  run.cfg = spec.cfg;
  const auto oass = sim::run_closed_loop(net, run);
  double avg = 0;
  for (const auto& c : oass.metrics.cycles) avg += static_cast<double>(c.changes_total);
  avg /= static_cast<double>(oass.metrics.cycles.size());
  CHECK(last == doctest::Approx(avg));
}

TEST_CASE("the verification suite passes clean and fails when sabotaged") {
  verify::SuiteOptions opts;
  opts.qp_instances = 30;
  opts.condensation_instances = 4;
  const auto clean = verify::run_suite(opts);
  CHECK(verify::all_passed(clean));
  CHECK(clean.size() == 4);

  opts.inject_defect = true;
  const auto sabotaged = verify::run_suite(opts);
  CHECK_FALSE(verify::all_passed(sabotaged));
  bool named = false;
  for (const auto& r : sabotaged)
    if (!r.passed && r.name == "qp-oracle-equivalence") named = true;
  CHECK(named);

  std::ostringstream out;
  CHECK(cli::cmd_verify(opts, out) == 1);
  CHECK(out.str().find("[FAIL] qp-oracle-equivalence") != std::string::npos);
}

TEST_CASE("sweeping more intervals never increases the last-interval average") {
  TempDir tmp;
  auto spec = cli::parse_spec_file("data/toy.spec");
  spec.cycles = 40;
  spec.out_dir = tmp.path / "out";
  spec.scenario_kinds = {sim::Scenario::Kind::constant};
  std::ostringstream out, err;
  REQUIRE(cli::cmd_sweep(spec, 1, 4, out, err) == 0);
  std::ifstream in(spec.out_dir / "sweep.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  double prev = 1e9;
  while (std::getline(in, line)) {
    double n = 0, last = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &n, &last) == 2);
    CHECK(last <= prev + 1e-12);
    prev = last;
  }
}
