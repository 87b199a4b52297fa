/*
 * Copyright 2026 The qstar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// qstar: command-line runner for N-Rank, bitmap generation, load sweeps,
// single runs and trace replay. Every command writes CSV files into --out.
//
// Exit status: 0 success, 1 configuration or input error, 2 runtime error,
// 3 deadlock detected.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "qstar/bidor.h"
#include "qstar/config.h"
#include "qstar/experiment.h"
#include "qstar/nrank.h"
#include "qstar/report.h"
#include "qstar/simulator.h"
#include "qstar/topology.h"
#include "qstar/traffic.h"

namespace fs = std::filesystem;

namespace qstar {
namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2, kDeadlock = 3 };

// Errors raised while reading configuration and inputs.
struct ConfigError : Error {
  using Error::Error;
};

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = ".";
  std::string seeds;
  int jobs = 0;
};

Config load_config(const Options& opt) {
  try {
    Config c;
    if (!opt.config_path.empty()) c.load_file(opt.config_path);
    for (const auto& s : opt.sets) c.set_assignment(s);
    if (!opt.seeds.empty()) c.set("sweep.seeds", opt.seeds);
    if (opt.jobs > 0) c.set("sweep.jobs", std::to_string(opt.jobs));
    return c;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

// Runs `f` and rethrows its failures as configuration errors.
template <typename F>
auto configure(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::ofstream open_out(const Options& opt, const std::string& name) {
  const fs::path path = fs::path(opt.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

int cmd_nrank(const Options& opt) {
  const Config c = load_config(opt);
  const auto [topo, matrix, nr_opts] = configure([&] {
    Topology t = make_topology(c);
    TrafficMatrix m = make_traffic(c, t, parse_pattern(c.get("traffic.pattern")));
    return std::tuple{std::move(t), std::move(m), make_nrank_options(c)};
  });
  const NRankResult nr = run_nrank(topo, matrix, nr_opts);
  auto out = open_out(opt, "nrank.csv");
  write_nrank_csv(out, nr);
  auto log = open_out(opt, "nrank_log.csv");
  write_convergence_log(log, nr);
  fmt::print("nrank: {} iterations, residual {:.6g}, converged={}\n", nr.iterations,
             nr.residual, nr.converged);
  return kOk;
}

int cmd_bitmaps(const Options& opt) {
  const Config c = load_config(opt);
  const auto [topo, matrix, nr_opts] = configure([&] {
    Topology t = make_topology(c);
    TrafficMatrix m = make_traffic(c, t, parse_pattern(c.get("traffic.pattern")));
    return std::tuple{std::move(t), std::move(m), make_nrank_options(c)};
  });
  const RouteBitmaps bm = compute_bitmaps(topo, run_nrank(topo, matrix, nr_opts));
  export_bitmaps(bm, fs::path(opt.out_dir) / "bitmaps.txt");
  fmt::print("bitmaps: {} of {} pairs use YX\n", bm.count_yx(),
             topo.num_io_nodes() * (topo.num_io_nodes() - 1));
  return kOk;
}

int cmd_sweep(const Options& opt) {
  const Config c = load_config(opt);
  const auto [plan, ctx, jobs, cap, frac] = configure([&] {
    SweepPlan p = make_sweep_plan(c);
    SweepContext x = make_sweep_context(c, p);
    return std::tuple{std::move(p), std::move(x),
                      static_cast<int>(c.get_int("sweep.jobs")),
                      c.get_double("metrics.latency_cap_factor"),
                      c.get_double("metrics.accept_fraction")};
  });
  const auto cells = expand(plan);
  auto csv = open_out(opt, "sweep.csv");
  auto errors = open_out(opt, "sweep_errors.csv");
  csv << sweep_csv_header() << '\n';
  errors << "algo,pattern,rate,seed,error\n";
  std::size_t done = 0;
  int deadlocks = 0;
  const auto outcomes = run_sweep(ctx, cells, jobs, [&](const SweepOutcome& o) {
    ++done;
    if (o.error.empty()) {
      csv << sweep_csv_row(o) << '\n' << std::flush;
    } else {
      if (o.report.deadlock) ++deadlocks;
      errors << fmt::format("{},{},{:.4f},{},\"{}\"\n", to_string(o.cell.algorithm),
                            to_string(o.cell.pattern), o.cell.rate, o.cell.seed,
                            o.error)
             << std::flush;
    }
    std::cerr << fmt::format("\r[{}/{}]", done, cells.size()) << std::flush;
  });
  std::cerr << '\n';

  auto sat = open_out(opt, "saturation.csv");
  sat << "algo,pattern,seed,saturation_rate,status\n";
  for (const auto& row : saturation_table(outcomes, cap, frac)) {
    sat << fmt::format("{},{},{},{:.4f},{}\n", to_string(row.algorithm),
                       to_string(row.pattern), row.seed, row.estimate.rate,
                       to_string(row.estimate.status));
  }
  if (deadlocks > 0) {
    std::cerr << fmt::format("qstar: {} sweep cells deadlocked\n", deadlocks);
    return kDeadlock;
  }
  return kOk;
}

int cmd_single(const Options& opt) {
  const Config c = load_config(opt);
  const auto [topo, sim, matrix, bitmaps, pattern] = configure([&] {
    Topology t = make_topology(c);
    SimConfig s = make_sim_config(c);
    const Pattern p = parse_pattern(c.get("traffic.pattern"));
    TrafficMatrix m = make_traffic(c, t, p);
    RouteBitmaps b;
    if (s.algorithm == Algorithm::kBiDOR) b = make_bitmaps(c, t, m);
    return std::tuple{std::move(t), s, std::move(m), std::move(b), p};
  });
  const SimResults res =
      run(topo, sim, matrix, sim.algorithm == Algorithm::kBiDOR ? &bitmaps : nullptr);
  const SweepOutcome o{{sim.algorithm, pattern, sim.rate, sim.seed}, make_report(res), {}};
  auto out = open_out(opt, "single.csv");
  out << sweep_csv_header() << ",offered,packets,unfinished,deadlock\n"
      << sweep_csv_row(o)
      << fmt::format(",{:.6f},{},{},{}\n", o.report.offered, o.report.packets,
                     o.report.unfinished, o.report.deadlock ? 1 : 0);
  auto loads = open_out(opt, "loads.csv");
  loads << "node,x,y,load\n";
  for (NodeId n = 0; n < topo.num_nodes(); ++n) {
    const Coord xy = topo.coord(n);
    loads << fmt::format("{},{},{},{:.6f}\n", n, xy.x, xy.y, o.report.node_load[n]);
  }
  fmt::print("{}: accepted {:.4f}, mean latency {:.2f}, lcv {:.4f}, reorder {}\n",
             to_string(sim.algorithm), o.report.accepted, o.report.mean_latency,
             o.report.lcv, o.report.reorder_peak);
  if (!res.invariant_violation.empty()) {
    std::cerr << "qstar: invariant violated: " << res.invariant_violation << '\n';
    return kRuntimeError;
  }
  return res.deadlock ? kDeadlock : kOk;
}

int cmd_replay(const Options& opt) {
  const Config c = load_config(opt);
  const auto [topo, sim, trace, bitmaps] = configure([&] {
    Topology t = make_topology(c);
    SimConfig s = make_sim_config(c);
    s.record_packets = true;
    const std::string& path = c.get("traffic.trace");
    if (path.empty()) throw Error("replay needs traffic.trace");
    Trace tr = load_trace(path, t);
    RouteBitmaps b;
    if (s.algorithm == Algorithm::kBiDOR) {
      // Bitmaps come from a file, or from the trace's own traffic matrix.
      if (!c.get("bidor.bitmaps").empty()) {
        b = import_bitmaps(c.get("bidor.bitmaps"), t.num_nodes());
      } else if (!tr.empty()) {
        b = make_bitmaps(c, t, tr.matrix());
      } else {
        b = RouteBitmaps(t.num_nodes());
      }
    }
    return std::tuple{std::move(t), s, std::move(tr), std::move(b)};
  });
  const SimResults res = replay(topo, sim, trace, &bitmaps);
  const MetricsReport rep = make_report(res);

  auto packets = open_out(opt, "replay_packets.csv");
  packets << "id,src,dst,flits,created,ejected,latency\n";
  for (const auto& p : res.packets) {
    packets << fmt::format("{},{},{},{},{},{},{}\n", p.id, p.src, p.dst, p.flits,
                           p.created, p.ejected,
                           p.ejected < 0 ? -1 : p.ejected - p.created);
  }

  std::map<std::int64_t, std::pair<double, int>> windows;
  for (const auto& [start, v] : window_lcv(res, sim.sample_window)) {
    windows[start].first = v;
  }
  for (const auto& [start, peak] : res.reorder_series) windows[start].second = peak;
  auto win = open_out(opt, "replay_windows.csv");
  win << "window_start,lcv,reorder\n";
  for (const auto& [start, v] : windows) {
    win << fmt::format("{},{:.6f},{}\n", start, v.first, v.second);
  }

  auto summary = open_out(opt, "replay_summary.csv");
  summary << "algo,packets,mean_lat,p99_lat,max_lat,lcv,reorder_peak,cycles,deadlock\n"
          << fmt::format("{},{},{:.3f},{:.3f},{:.3f},{:.6f},{},{},{}\n",
                         to_string(sim.algorithm), rep.packets, rep.mean_latency,
                         rep.p99_latency, rep.max_latency, rep.lcv,
                         rep.reorder_peak, res.cycles, res.deadlock ? 1 : 0);
  fmt::print("{}: {} packets, mean latency {:.2f}, reorder {}\n",
             to_string(sim.algorithm), rep.packets, rep.mean_latency,
             rep.reorder_peak);
  return res.deadlock ? kDeadlock : kOk;
}

}  // namespace
}  // namespace qstar

int main(int argc, char** argv) {
  using namespace qstar;
  CLI::App app{"qstar: mesh NoC simulator with N-Rank guided XY/YX route selection"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", opt.sets, "Override a key, as key=value (repeatable)")
        ->allow_extra_args(false);
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  };

  using Handler = int (*)(const Options&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands{
      {"nrank", "Run N-Rank and write node weights", cmd_nrank},
      {"bitmaps", "Compute XY/YX route bitmaps", cmd_bitmaps},
      {"sweep", "Injection-rate sweep over algorithms and patterns", cmd_sweep},
      {"single", "One synthetic run", cmd_single},
      {"replay", "Replay a packet trace", cmd_replay},
  };
  std::map<CLI::App*, Handler> handlers;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    if (std::string(name) == "sweep") {
      sub->add_option("--seeds", opt.seeds, "Comma-separated seeds");
      sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    }
    handlers[sub] = fn;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw ConfigError("cannot create '" + opt.out_dir + "': " + ec.message());
    for (auto* sub : app.get_subcommands()) return handlers.at(sub)(opt);
  } catch (const ConfigError& e) {
    std::cerr << "qstar: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "qstar: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
