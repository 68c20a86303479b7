#include "tsmpc/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

#include "tsmpc/error.hpp"
#include "tsmpc/textcfg.hpp"

namespace tsmpc::cli {

using textcfg::parse_double;
using textcfg::parse_int;
using textcfg::split_kv;

namespace {

std::size_t to_count(const std::string& value, const std::string& ctx) {
  const long long v = parse_int(value, ctx);
  require(v >= 0, Errc::parse_error, ctx + ": negative count");
  return static_cast<std::size_t>(v);
}

std::vector<mpc::Strategy> parse_strategies(const std::string& value, const std::string& ctx) {
  std::vector<mpc::Strategy> out;
  for (const auto& name : textcfg::split_list(value, ',')) {
    const auto s = mpc::strategy_from(name);
    require(s.has_value(), Errc::parse_error, ctx + ": unknown strategy '" + name + "'");
    out.push_back(*s);
  }
  require(!out.empty(), Errc::parse_error, ctx + ": empty strategy list");
  return out;
}

std::vector<sim::Scenario::Kind> parse_kinds(const std::string& value, const std::string& ctx) {
  std::vector<sim::Scenario::Kind> out;
  for (const auto& name : textcfg::split_list(value, ',')) {
    if (name == "constant") out.push_back(sim::Scenario::Kind::constant);
    else if (name == "random") out.push_back(sim::Scenario::Kind::random_uniform);
    else fail(Errc::parse_error, ctx + ": unknown scenario '" + name + "'");
  }
  require(!out.empty(), Errc::parse_error, ctx + ": empty scenario list");
  return out;
}

std::string label_of(mpc::Strategy s) {
  switch (s) {
    case mpc::Strategy::cold: return "MPC";
    case mpc::Strategy::oass: return "MPC-oass";
    case mpc::Strategy::ours: return "MPC-ours";
  }
  return "?";
}

struct RunJob {
  sim::Scenario::Kind kind;
  mpc::Strategy strategy;
  sim::RunResult result;
};

// Runs the scenario x strategy grid, `jobs` runs in flight at a time.
std::vector<RunJob> run_grid(const sfm::TrafficNetwork& net, const ExperimentSpec& spec) {
  std::vector<RunJob> jobs;
  for (const auto kind : spec.scenario_kinds)
    for (const auto strategy : spec.strategies) jobs.push_back({kind, strategy, {}});

  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t mine;
      {
        std::lock_guard lock(next_mutex);
        if (next >= jobs.size()) return;
        mine = next++;
      }
      sim::RunOptions run;
      run.strategy = jobs[mine].strategy;
      run.scenario = make_scenario(spec, jobs[mine].kind);
      run.cfg = spec.cfg;
      run.x0 = spec.x0;
      jobs[mine].result = sim::run_closed_loop(net, run);
    }
  };

  const std::size_t n_threads = std::max<std::size_t>(1, std::min(spec.jobs, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return jobs;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fn) {
  std::ofstream out(path);
  require(out.good(), Errc::io_error, "cannot write '" + path.string() + "'");
  fn(out);
}

}  // namespace

std::pair<std::size_t, std::size_t> parse_sweep_range(const std::string& text,
                                                      const std::string& ctx) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, Errc::parse_error, ctx + ": sweep range must be LO:HI");
  const auto lo = to_count(text.substr(0, colon), ctx);
  const auto hi = to_count(text.substr(colon + 1), ctx);
  require(lo >= 1 && lo <= hi, Errc::parse_error, ctx + ": sweep range must satisfy 1 <= LO <= HI");
  return {lo, hi};
}

sim::Scenario make_scenario(const ExperimentSpec& spec, sim::Scenario::Kind kind) {
  sim::Scenario sc;
  sc.kind = kind;
  sc.rate = spec.rate;
  sc.lo = spec.lo;
  sc.hi = spec.hi;
  sc.horizon_cycles = spec.cycles;
  sc.seed = spec.seed;
  return sc;
}

ExperimentSpec parse_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io_error, "cannot open spec file '" + path.string() + "'");
  const auto sections = textcfg::parse(in, path.string());

  ExperimentSpec spec;
  for (const auto& section : sections) {
    const std::string ctx = path.string() + " [" + section.name + "]";
    for (const auto& row : section.rows) {
      // x0 rows carry several tokens; everything else is one key=value
      std::string key, value;
      if (row.tokens.empty() || !split_kv(row.tokens[0], key, value)) continue;
      if (section.name == "network") {
        if (key == "file") {
          std::filesystem::path p = value;
          spec.network_file = p.is_absolute() ? p : path.parent_path() / p;
        } else if (key == "x0") {
          spec.x0.clear();
          spec.x0.push_back(parse_double(value, ctx));
          for (std::size_t t = 1; t < row.tokens.size(); ++t)
            spec.x0.push_back(parse_double(row.tokens[t], ctx));
        }
      } else if (section.name == "scenario") {
        if (key == "kinds") spec.scenario_kinds = parse_kinds(value, ctx);
        else if (key == "rate") spec.rate = parse_double(value, ctx);
        else if (key == "lo") spec.lo = parse_double(value, ctx);
        else if (key == "hi") spec.hi = parse_double(value, ctx);
        else if (key == "cycles") spec.cycles = to_count(value, ctx);
      } else if (section.name == "mpc") {
        if (key == "horizon") spec.cfg.horizon = to_count(value, ctx);
        else if (key == "n_itr") spec.cfg.n_itr = to_count(value, ctx);
        else if (key == "u_min") spec.cfg.u_min = parse_double(value, ctx);
        else if (key == "u_max") spec.cfg.u_max = parse_double(value, ctx);
        else if (key == "budget")
          spec.cfg.interval_budget =
              value == "unlimited" ? std::nullopt : std::optional(to_count(value, ctx));
        else if (key == "n_itr_ceiling") spec.cfg.n_itr_ceiling = to_count(value, ctx);
      } else if (section.name == "run") {
        if (key == "strategies") spec.strategies = parse_strategies(value, ctx);
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_int(value, ctx));
        else if (key == "out") spec.out_dir = value;
        else if (key == "jobs") spec.jobs = std::max<std::size_t>(1, to_count(value, ctx));
        else if (key == "isa") spec.isa = value;
        else if (key == "sweep") spec.sweep = parse_sweep_range(value, ctx);
      }
      // unknown sections/keys tolerated
    }
  }
  require(!spec.network_file.empty(), Errc::parse_error,
          path.string() + ": [network] file is required");
  return spec;
}

int cmd_run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    const auto net = sfm::load_network(spec.network_file);
    std::filesystem::create_directories(spec.out_dir);
    const auto jobs = run_grid(net, spec);

    for (const auto& job : jobs) {
      const std::string stem = std::string(sim::scenario_kind_name(job.kind)) + "_" +
                               mpc::strategy_name(job.strategy);
      write_file(spec.out_dir / ("metrics_" + stem + ".csv"), [&](std::ostream& f) {
        sim::write_metrics_csv(f, job.strategy, job.result.metrics);
      });
      write_file(spec.out_dir / ("trajectory_" + stem + ".csv"), [&](std::ostream& f) {
        sim::write_trajectory_csv(f, net, job.result);
      });
    }

    // per-strategy timing summary, one row per strategy, per-scenario columns
    out << "network: " << net.name() << ", cycles: " << spec.cycles << ", seed: " << spec.seed
        << "\n\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-10s", "strategy");
    out << line;
    for (const auto kind : spec.scenario_kinds) {
      const std::string head = std::string(sim::scenario_kind_name(kind)) +
                               ":   max us       avg us            tts";
      std::snprintf(line, sizeof(line), " | %-40s", head.c_str());
      out << line;
    }
    out << '\n';
    for (const auto strategy : spec.strategies) {
      std::snprintf(line, sizeof(line), "%-10s", label_of(strategy).c_str());
      out << line;
      for (const auto kind : spec.scenario_kinds) {
        const auto it = std::find_if(jobs.begin(), jobs.end(), [&](const RunJob& j) {
          return j.kind == kind && j.strategy == strategy;
        });
        std::snprintf(line, sizeof(line), " | %12.3f %12.3f %14.1f",
                      it->result.metrics.max_time_us(), it->result.metrics.avg_time_us(),
                      it->result.metrics.total_tts());
        out << line;
      }
      out << '\n';
    }
    out << "\noutputs in " << spec.out_dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_sweep(const ExperimentSpec& spec, std::size_t lo, std::size_t hi, std::ostream& out,
              std::ostream& err) {
  try {
    require(lo >= 1 && lo <= hi, Errc::parse_error, "sweep range must satisfy 1 <= lo <= hi");
    const auto net = sfm::load_network(spec.network_file);
    std::filesystem::create_directories(spec.out_dir);

    struct SweepRow {
      std::size_t n_itr;
      double avg_last, avg_total, avg_time_us;
    };
    std::vector<SweepRow> rows(hi - lo + 1);

    std::mutex next_mutex;
    std::size_t next = 0;
    auto worker = [&] {
      while (true) {
        std::size_t mine;
        {
          std::lock_guard lock(next_mutex);
          if (next >= rows.size()) return;
          mine = next++;
        }
        sim::RunOptions run;
        run.strategy = mpc::Strategy::ours;
        run.scenario = make_scenario(spec, spec.scenario_kinds.front());
        run.cfg = spec.cfg;
        run.cfg.n_itr = lo + mine;
        run.x0 = spec.x0;
        const auto result = sim::run_closed_loop(net, run);
        double last = 0.0, total = 0.0, time = 0.0;
        for (const auto& c : result.metrics.cycles) {
          last += static_cast<double>(c.changes_last_interval);
          total += static_cast<double>(c.changes_total);
          time += c.solve_time_us;
        }
        const auto nc = static_cast<double>(std::max<std::size_t>(1, spec.cycles));
        rows[mine] = {lo + mine, last / nc, total / nc, time / nc};
      }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(spec.jobs, rows.size()));
    if (n_threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    double plateau = rows.front().avg_last;
    for (const auto& r : rows) plateau = std::min(plateau, r.avg_last);
    std::size_t recommended = rows.back().n_itr;
    for (const auto& r : rows)
      if (r.avg_last <= plateau + 0.05) {
        recommended = r.n_itr;
        break;
      }

    write_file(spec.out_dir / "sweep.csv", [&](std::ostream& f) {
      f << "# tsmpc-sweep v1\n";
      f << "n_itr,avg_changes_last_interval,avg_changes_total,avg_solve_time_us\n";
      char buf[128];
      for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g\n", r.n_itr, r.avg_last,
                      r.avg_total, r.avg_time_us);
        f << buf;
      }
    });

    out << "n_itr  avg last-interval changes  avg total changes\n";
    char buf[128];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%5zu  %25.3f  %17.3f%s\n", r.n_itr, r.avg_last,
                    r.avg_total, r.n_itr == recommended ? "   <- operating point" : "");
      out << buf;
    }
    out << "\nrecommended n_itr: " << recommended << " (smallest count on the plateau)\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify(const verify::SuiteOptions& opts, std::ostream& out) {
  const auto results = verify::run_suite(opts);
  for (const auto& r : results) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.instances << " instances";
    if (!r.detail.empty()) out << "; " << r.detail;
    out << ")\n";
  }
  return verify::all_passed(results) ? 0 : 1;
}

}  // namespace tsmpc::cli
