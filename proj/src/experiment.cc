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
#include "qstar/experiment.h"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>
#include <tuple>

#include <fmt/format.h>

namespace qstar {

Topology make_topology(const Config& config) {
  return build_mesh(static_cast<int>(config.get_int("topology.width")),
                    static_cast<int>(config.get_int("topology.height")),
                    parse_io_mode(config.get("topology.io_mode")));
}

SimConfig make_sim_config(const Config& config) {
  SimConfig sim;
  sim.algorithm = parse_algorithm(config.get("sim.algorithm"));
  sim.rate = config.get_double("sim.rate");
  sim.packet_flits = static_cast<int>(config.get_int("sim.packet_flits"));
  sim.warmup_cycles = config.get_int("sim.warmup");
  sim.measure_cycles = config.get_int("sim.measure");
  sim.drain_cycles = config.get_int("sim.drain");
  sim.seed = static_cast<std::uint64_t>(config.get_int("sim.seed"));
  sim.buffer_per_port = static_cast<int>(config.get_int("sim.buffer_per_port"));
  sim.vcs = static_cast<int>(config.get_int("sim.vcs"));
  sim.hop_latency = static_cast<int>(config.get_int("sim.hop_latency"));
  sim.stall_window = config.get_int("sim.stall_window");
  sim.sample_window = config.get_int("sim.sample_window");
  sim.check_invariants = config.get_bool("sim.check_invariants");
  sim.validate();
  return sim;
}

NRankOptions make_nrank_options(const Config& config) {
  NRankOptions opts;
  opts.w_th = config.get_double("nrank.w_th");
  opts.iter_th = static_cast<int>(config.get_int("nrank.iter_th"));
  if (!(opts.w_th > 0.0) || opts.iter_th < 1) {
    throw Error("nrank.w_th and nrank.iter_th must be positive");
  }
  return opts;
}

TrafficMatrix make_traffic(const Config& config, const Topology& topo,
                           Pattern pattern) {
  const std::string& file = config.get("traffic.matrix");
  if (!file.empty()) return load_matrix(file, topo);
  return generate_pattern(topo, pattern,
                          static_cast<std::uint64_t>(config.get_int("traffic.seed")));
}

RouteBitmaps make_bitmaps(const Config& config, const Topology& topo,
                          const TrafficMatrix& matrix) {
  const std::string& file = config.get("bidor.bitmaps");
  if (!file.empty()) return import_bitmaps(file, topo.num_nodes());
  return compute_bitmaps(topo, run_nrank(topo, matrix, make_nrank_options(config)));
}

SweepPlan make_sweep_plan(const Config& config) {
  SweepPlan plan;
  for (const auto& a : config.get_list("sweep.algorithms")) {
    plan.algorithms.push_back(parse_algorithm(a));
  }
  for (const auto& p : config.get_list("sweep.patterns")) {
    plan.patterns.push_back(parse_pattern(p));
  }
  plan.rates = parse_rates(config.get("sweep.rates"));
  plan.seeds = parse_seeds(config.get("sweep.seeds"));
  if (plan.algorithms.empty() || plan.patterns.empty()) {
    throw Error("sweep needs at least one algorithm and one pattern");
  }
  return plan;
}

std::vector<SweepCell> expand(const SweepPlan& plan) {
  std::vector<SweepCell> cells;
  for (auto seed : plan.seeds) {
    for (auto pattern : plan.patterns) {
      for (auto algo : plan.algorithms) {
        for (double rate : plan.rates) cells.push_back({algo, pattern, rate, seed});
      }
    }
  }
  return cells;
}

SweepContext make_sweep_context(const Config& config, const SweepPlan& plan) {
  SweepContext ctx{make_topology(config), make_sim_config(config), {}, {}};
  const bool needs_bitmaps =
      std::find(plan.algorithms.begin(), plan.algorithms.end(),
                Algorithm::kBiDOR) != plan.algorithms.end();
  for (auto pattern : plan.patterns) {
    auto matrix = make_traffic(config, ctx.topo, pattern);
    if (needs_bitmaps) {
      ctx.bitmaps.emplace(pattern, make_bitmaps(config, ctx.topo, matrix));
    }
    ctx.matrices.emplace(pattern, std::move(matrix));
  }
  return ctx;
}

SweepOutcome run_cell(const SweepContext& ctx, const SweepCell& cell) {
  SweepOutcome out{cell, {}, {}};
  try {
    SimConfig sim = ctx.base;
    sim.algorithm = cell.algorithm;
    sim.rate = cell.rate;
    sim.seed = cell.seed;
    const RouteBitmaps* bitmaps = nullptr;
    if (const auto it = ctx.bitmaps.find(cell.pattern); it != ctx.bitmaps.end()) {
      bitmaps = &it->second;
    }
    const SimResults res = run(ctx.topo, sim, ctx.matrices.at(cell.pattern), bitmaps);
    out.report = make_report(res);
    if (res.deadlock) out.error = "deadlock";
    if (!res.invariant_violation.empty()) out.error = res.invariant_violation;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::vector<SweepOutcome> run_sweep(
    const SweepContext& ctx, const std::vector<SweepCell>& cells, int jobs,
    const std::function<void(const SweepOutcome&)>& sink) {
  std::vector<SweepOutcome> outcomes(cells.size());
  std::vector<bool> done(cells.size(), false);
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t written = 0;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      SweepOutcome outcome = run_cell(ctx, cells[i]);
      std::lock_guard<std::mutex> lock(mu);
      outcomes[i] = std::move(outcome);
      done[i] = true;
      while (written < cells.size() && done[written]) {
        if (sink) sink(outcomes[written]);
        ++written;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return outcomes;
}

std::string sweep_csv_header() {
  return "algo,pattern,rate,seed,accepted,mean_lat,p99_lat,max_lat,lcv,reorder_peak";
}

std::string sweep_csv_row(const SweepOutcome& o) {
  const auto& r = o.report;
  return fmt::format("{},{},{:.4f},{},{:.6f},{:.3f},{:.3f},{:.3f},{:.6f},{}",
                     to_string(o.cell.algorithm), to_string(o.cell.pattern),
                     o.cell.rate, o.cell.seed, r.accepted, r.mean_latency,
                     r.p99_latency, r.max_latency, r.lcv, r.reorder_peak);
}

std::vector<SaturationRow> saturation_table(
    const std::vector<SweepOutcome>& outcomes, double latency_cap_factor,
    double accept_fraction) {
  std::map<std::tuple<std::uint64_t, Pattern, Algorithm>, std::vector<LoadPoint>> curves;
  for (const auto& o : outcomes) {
    LoadPoint p;
    p.rate = o.cell.rate;
    p.offered = o.report.offered;
    p.accepted = o.report.accepted;
    p.mean_latency = o.report.mean_latency;
    if (!o.error.empty()) p.accepted = 0.0;
    curves[{o.cell.seed, o.cell.pattern, o.cell.algorithm}].push_back(p);
  }
  std::vector<SaturationRow> rows;
  for (const auto& [key, points] : curves) {
    const auto& [seed, pattern, algo] = key;
    rows.push_back({algo, pattern, seed,
                    saturation_throughput(points, latency_cap_factor, accept_fraction)});
  }
  return rows;
}

std::string_view to_string(SaturationStatus status) {
  switch (status) {
    case SaturationStatus::kOk: return "ok";
    case SaturationStatus::kNeverSaturated: return "never_saturated";
    case SaturationStatus::kAlwaysSaturated: return "always_saturated";
  }
  return "?";
}

}  // namespace qstar
