#pragma once

#include <filesystem>
#include <iosfwd>

#include "tsmpc/sim.hpp"
#include "tsmpc/verify.hpp"

namespace tsmpc::cli {

// Everything one batch of closed-loop runs needs; parsed from an experiment
// spec file, then adjusted by command-line flags (flag > file > default).
struct ExperimentSpec {
  std::filesystem::path network_file;
  linalg::Vector x0;  // initial queues; zeros when empty

  std::vector<sim::Scenario::Kind> scenario_kinds{sim::Scenario::Kind::constant,
                                                  sim::Scenario::Kind::random_uniform};
  double rate = 1200.0;
  double lo = 200.0;
  double hi = 2400.0;
  std::size_t cycles = 100;

  mpc::MpcConfig cfg;

  std::vector<mpc::Strategy> strategies{mpc::Strategy::cold, mpc::Strategy::oass,
                                        mpc::Strategy::ours};
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  std::size_t jobs = 1;
  std::string isa = "auto";
  std::optional<std::pair<std::size_t, std::size_t>> sweep;  // interval-count range
};

ExperimentSpec parse_spec_file(const std::filesystem::path& path);

std::pair<std::size_t, std::size_t> parse_sweep_range(const std::string& text,
                                                      const std::string& ctx);

sim::Scenario make_scenario(const ExperimentSpec& spec, sim::Scenario::Kind kind);

// Runs every scenario x strategy combination, writes metrics/trajectory CSV
// files under out_dir, prints a per-strategy timing summary. Returns a
// process exit status.
int cmd_run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

// Repeats the `ours` run on the first configured scenario for every interval
// count in [lo, hi], writes out_dir/sweep.csv, flags the smallest count whose
// average last-interval change count sits on the plateau.
int cmd_sweep(const ExperimentSpec& spec, std::size_t lo, std::size_t hi, std::ostream& out,
              std::ostream& err);

int cmd_verify(const verify::SuiteOptions& opts, std::ostream& out);

}  // namespace tsmpc::cli
