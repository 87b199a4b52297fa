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
#ifndef QSTAR_NRANK_H_
#define QSTAR_NRANK_H_

#include <iosfwd>
#include <vector>

#include "qstar/topology.h"
#include "qstar/traffic.h"

namespace qstar {

// Per-channel quantities of the evolutionary load model, indexed by
// ChannelId.
struct ChannelProbabilities {
  // Share of traffic whose minimal routes may use the channel.
  std::vector<double> weight;
  // Part of `weight` whose destination is the channel's head node.
  std::vector<double> drain_weight;
  // weight / sum of weights leaving the same node (0 when that sum is 0).
  std::vector<double> transfer;
  // drain_weight / weight (0 when weight is 0).
  std::vector<double> drain;
};

struct NRankOptions {
  double w_th = 0.01;
  int iter_th = 100;
};

struct NRankResult {
  std::vector<double> w_nr;
  std::vector<double> w0;
  int iterations = 0;
  // Total circulating weight after the last iteration.
  double residual = 0.0;
  bool converged = false;
  // Circulating weight after each iteration; entry 0 is the initial total.
  std::vector<double> residual_history;
};

// Fills `weight` and `drain_weight` only.
ChannelProbabilities possibility_weights(const Topology& topo,
                                         const TrafficMatrix& m);

// Possibility weights plus transfer and drain probabilities.
ChannelProbabilities transition_probabilities(const Topology& topo,
                                              const TrafficMatrix& m);

// Runs the weight evolution until the circulating weight drops below w_th or
// iter_th iterations have run. At least one iteration always executes; the
// threshold is checked after each one. All nodes update synchronously from
// the previous iteration's weights.
NRankResult run_nrank(const Topology& topo, const TrafficMatrix& m,
                      const NRankOptions& options = {});

// `node,w0,w_nr`
void write_nrank_csv(std::ostream& out, const NRankResult& result);
// `iteration,residual`
void write_convergence_log(std::ostream& out, const NRankResult& result);

}  // namespace qstar

#endif  // QSTAR_NRANK_H_
