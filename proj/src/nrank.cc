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
#include "qstar/nrank.h"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

namespace qstar {

ChannelProbabilities possibility_weights(const Topology& topo,
                                         const TrafficMatrix& m) {
  if (m.size() != topo.num_nodes()) {
    throw Error("traffic matrix does not match the topology");
  }
  ChannelProbabilities out;
  out.weight.assign(topo.num_channels(), 0.0);
  out.drain_weight.assign(topo.num_channels(), 0.0);
  // Walk every node of MinRect(s, d) and credit the channels that make
  // progress toward d without leaving the rectangle.
  for (NodeId s = 0; s < m.size(); ++s) {
    for (NodeId d = 0; d < m.size(); ++d) {
      const double t = m(s, d);
      if (s == d || t <= 0.0) continue;
      const Coord cs = topo.coord(s);
      const Coord cd = topo.coord(d);
      const int step_x = cd.x > cs.x ? 1 : -1;
      const int step_y = cd.y > cs.y ? 1 : -1;
      const Port px = step_x > 0 ? Port::kEast : Port::kWest;
      const Port py = step_y > 0 ? Port::kNorth : Port::kSouth;
      for (int x = std::min(cs.x, cd.x); x <= std::max(cs.x, cd.x); ++x) {
        for (int y = std::min(cs.y, cd.y); y <= std::max(cs.y, cd.y); ++y) {
          const NodeId u = topo.node_at({x, y});
          auto credit = [&](Port port) {
            const ChannelId id = *topo.channel_at(u, port);
            out.weight[id] += t;
            if (topo.channel(id).dst == d) out.drain_weight[id] += t;
          };
          if (x != cd.x) credit(px);
          if (y != cd.y) credit(py);
        }
      }
    }
  }
  return out;
}

ChannelProbabilities transition_probabilities(const Topology& topo,
                                              const TrafficMatrix& m) {
  ChannelProbabilities out = possibility_weights(topo, m);
  out.transfer.assign(topo.num_channels(), 0.0);
  out.drain.assign(topo.num_channels(), 0.0);
  for (NodeId u = 0; u < topo.num_nodes(); ++u) {
    double total = 0.0;
    for (ChannelId id : topo.out_channels(u)) total += out.weight[id];
    if (total <= 0.0) continue;
    for (ChannelId id : topo.out_channels(u)) {
      out.transfer[id] = out.weight[id] / total;
    }
  }
  for (ChannelId id = 0; id < topo.num_channels(); ++id) {
    if (out.weight[id] > 0.0) {
      out.drain[id] = out.drain_weight[id] / out.weight[id];
    }
  }
  return out;
}

NRankResult run_nrank(const Topology& topo, const TrafficMatrix& m,
                      const NRankOptions& options) {
  if (!(options.w_th > 0.0) || options.iter_th < 1) {
    throw Error("N-Rank thresholds must be positive");
  }
  const ChannelProbabilities probs = transition_probabilities(topo, m);
  const int n = topo.num_nodes();

  NRankResult result;
  result.w0.resize(n);
  for (NodeId node = 0; node < n; ++node) result.w0[node] = m.row_sum(node);
  result.w_nr = result.w0;
  std::vector<double> w = result.w0;
  std::vector<double> next(n);
  result.residual = std::accumulate(w.begin(), w.end(), 0.0);
  result.residual_history.push_back(result.residual);

  do {
    std::fill(next.begin(), next.end(), 0.0);
    for (ChannelId id = 0; id < topo.num_channels(); ++id) {
      const Channel& ch = topo.channel(id);
      const double moved = w[ch.src] * probs.transfer[id];
      if (moved == 0.0) continue;
      result.w_nr[ch.dst] += moved;
      next[ch.dst] += moved * (1.0 - probs.drain[id]);
    }
    w.swap(next);
    ++result.iterations;
    result.residual = std::accumulate(w.begin(), w.end(), 0.0);
    result.residual_history.push_back(result.residual);
  } while (result.residual >= options.w_th &&
           result.iterations < options.iter_th);

  result.converged = result.residual < options.w_th;
  return result;
}

void write_nrank_csv(std::ostream& out, const NRankResult& result) {
  out << "node,w0,w_nr\n";
  for (std::size_t i = 0; i < result.w_nr.size(); ++i) {
    out << fmt::format("{},{:.10g},{:.10g}\n", i, result.w0[i], result.w_nr[i]);
  }
}

void write_convergence_log(std::ostream& out, const NRankResult& result) {
  out << "iteration,residual\n";
  for (std::size_t i = 0; i < result.residual_history.size(); ++i) {
    out << fmt::format("{},{:.10g}\n", i, result.residual_history[i]);
  }
}

}  // namespace qstar
