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
#ifndef QSTAR_EXPERIMENT_H_
#define QSTAR_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qstar/bidor.h"
#include "qstar/config.h"
#include "qstar/metrics.h"
#include "qstar/nrank.h"
#include "qstar/report.h"
#include "qstar/routing.h"
#include "qstar/simulator.h"
#include "qstar/topology.h"
#include "qstar/traffic.h"

namespace qstar {

Topology make_topology(const Config& config);
SimConfig make_sim_config(const Config& config);
NRankOptions make_nrank_options(const Config& config);

// traffic.matrix when set, otherwise `pattern` seeded with traffic.seed.
TrafficMatrix make_traffic(const Config& config, const Topology& topo,
                           Pattern pattern);
// bidor.bitmaps when set, otherwise N-Rank over `matrix` then bitmaps.
RouteBitmaps make_bitmaps(const Config& config, const Topology& topo,
                          const TrafficMatrix& matrix);

struct SweepCell {
  Algorithm algorithm = Algorithm::kXY;
  Pattern pattern = Pattern::kUniform;
  double rate = 0.0;
  std::uint64_t seed = 1;
};

struct SweepOutcome {
  SweepCell cell;
  MetricsReport report;
  std::string error;  // empty on success
};

struct SweepPlan {
  std::vector<Algorithm> algorithms;
  std::vector<Pattern> patterns;
  std::vector<double> rates;
  std::vector<std::uint64_t> seeds;
};

SweepPlan make_sweep_plan(const Config& config);
// Cells ordered by seed, pattern, algorithm, then rate.
std::vector<SweepCell> expand(const SweepPlan& plan);

// Immutable inputs shared by all cells of a sweep.
struct SweepContext {
  Topology topo;
  SimConfig base;
  std::map<Pattern, TrafficMatrix> matrices;
  std::map<Pattern, RouteBitmaps> bitmaps;
};

SweepContext make_sweep_context(const Config& config, const SweepPlan& plan);

// Never throws; failures are reported in SweepOutcome::error.
SweepOutcome run_cell(const SweepContext& ctx, const SweepCell& cell);

// Runs cells on up to `jobs` threads. `sink` is called once per cell, in
// cell order, never concurrently.
std::vector<SweepOutcome> run_sweep(
    const SweepContext& ctx, const std::vector<SweepCell>& cells, int jobs,
    const std::function<void(const SweepOutcome&)>& sink = {});

// `algo,pattern,rate,seed,accepted,mean_lat,p99_lat,max_lat,lcv,reorder_peak`
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepOutcome& outcome);

struct SaturationRow {
  Algorithm algorithm;
  Pattern pattern;
  std::uint64_t seed;
  SaturationEstimate estimate;
};

// One saturation estimate per (algorithm, pattern, seed) curve.
std::vector<SaturationRow> saturation_table(
    const std::vector<SweepOutcome>& outcomes, double latency_cap_factor,
    double accept_fraction);

std::string_view to_string(SaturationStatus status);

}  // namespace qstar

#endif  // QSTAR_EXPERIMENT_H_
