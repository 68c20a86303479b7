#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tsmpc/experiment.hpp"
#include "tsmpc/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"store-and-forward traffic signal MPC with a warm-started parametric QP solver"};

  std::string spec_path;
  std::vector<std::string> strategies;
  std::vector<std::string> scenarios;
  std::int64_t seed = -1;
  std::int64_t n_itr = -1;
  std::string sweep_range;
  std::int64_t jobs = -1;
  std::string out_dir;
  bool verify = false;
  std::string isa;
  bool inject_defect = false;

  app.add_option("--spec", spec_path, "experiment spec file (see README for the grammar)");
  app.add_option("--strategy", strategies, "strategy to run: cold, oass, ours (repeatable)");
  app.add_option("--scenario", scenarios, "scenario to run: constant, random (repeatable)");
  app.add_option("--seed", seed, "random seed override");
  app.add_option("--n-itr", n_itr, "sample intervals per cycle override");
  app.add_option("--sweep", sweep_range, "run an interval-count sweep LO:HI instead of a plain run");
  app.add_option("--jobs", jobs, "parallel runs");
  app.add_option("--out", out_dir, "output directory override");
  app.add_flag("--verify", verify, "run the built-in oracle suite and exit");
  app.add_option("--isa", isa, "kernel variant: auto, scalar, avx2");
  app.add_flag("--inject-defect", inject_defect)->group("");  // verification self-test hook

  CLI11_PARSE(app, argc, argv);

  if (verify) {
    if (!tsmpc::kernels::select(isa.empty() ? "auto" : isa)) {
      std::cerr << "error: kernel variant '" << isa << "' is not available on this machine\n";
      return 1;
    }
    tsmpc::verify::SuiteOptions opts;
    opts.inject_defect = inject_defect;
    if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
    return tsmpc::cli::cmd_verify(opts, std::cout);
  }

  if (spec_path.empty()) {
    std::cerr << "error: --spec is required (or use --verify)\n";
    return 1;
  }

  try {
    tsmpc::cli::ExperimentSpec spec = tsmpc::cli::parse_spec_file(spec_path);
    if (!isa.empty()) spec.isa = isa;
    if (!tsmpc::kernels::select(spec.isa)) {
      std::cerr << "error: kernel variant '" << spec.isa
                << "' is not available on this machine\n";
      return 1;
    }
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      const auto s = tsmpc::mpc::strategy_from(strategies[i]);
      if (!s) {
        std::cerr << "error: unknown strategy '" << strategies[i] << "'\n";
        return 1;
      }
      if (i == 0) spec.strategies.clear();
      spec.strategies.push_back(*s);
    }
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      if (i == 0) spec.scenario_kinds.clear();
      if (scenarios[i] == "constant")
        spec.scenario_kinds.push_back(tsmpc::sim::Scenario::Kind::constant);
      else if (scenarios[i] == "random")
        spec.scenario_kinds.push_back(tsmpc::sim::Scenario::Kind::random_uniform);
      else {
        std::cerr << "error: unknown scenario '" << scenarios[i] << "'\n";
        return 1;
      }
    }
    if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);
    if (n_itr >= 1) spec.cfg.n_itr = static_cast<std::size_t>(n_itr);
    if (jobs >= 1) spec.jobs = static_cast<std::size_t>(jobs);
    if (!out_dir.empty()) spec.out_dir = out_dir;

    if (!sweep_range.empty())
      spec.sweep = tsmpc::cli::parse_sweep_range(sweep_range, "--sweep");
    if (spec.sweep)
      return tsmpc::cli::cmd_sweep(spec, spec.sweep->first, spec.sweep->second, std::cout,
                                   std::cerr);
    return tsmpc::cli::cmd_run(spec, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
