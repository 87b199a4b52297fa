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
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "qstar/nrank.h"
#include "qstar/topology.h"
#include "qstar/traffic.h"

namespace qstar {
namespace {

// Reference evolution over the oracle's edge maps, iterated a fixed number
// of times.
std::vector<double> reference_nrank(int w, int h, const TrafficMatrix& m,
                                    int iterations) {
  const auto ew = oracle::possibility_weights(w, h, m);
  const int n = w * h;
  std::map<NodeId, double> out_total;
  for (const auto& [e, v] : ew.weight) out_total[e.first] += v;
  std::vector<double> cur(n), acc(n);
  for (NodeId s = 0; s < n; ++s) cur[s] = acc[s] = m.row_sum(s);
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> next(n, 0.0);
    for (const auto& [e, v] : ew.weight) {
      const double moved = cur[e.first] * v / out_total[e.first];
      const auto dr = ew.drain.find(e);
      const double drained = dr == ew.drain.end() ? 0.0 : dr->second / v;
      acc[e.second] += moved;
      next[e.second] += moved * (1.0 - drained);
    }
    cur = next;
  }
  return acc;
}

TEST_CASE("three-node line weights") {
  const Topology t = build_mesh(3, 1, IoMode::kAllNodes);
  const TrafficMatrix m = generate_pattern(t, Pattern::kUniform, 1);
  const auto p = transition_probabilities(t, m);
  const ChannelId c01 = *t.find_channel(0, 1);
  const ChannelId c10 = *t.find_channel(1, 0);
  CHECK(p.weight[c01] == doctest::Approx(1.0 / 3));
  CHECK(p.drain_weight[c01] == doctest::Approx(1.0 / 6));
  CHECK(p.weight[c10] == doctest::Approx(1.0 / 3));
  CHECK(p.transfer[c01] == doctest::Approx(1.0));
  CHECK(p.drain[c01] == doctest::Approx(0.5));
}

TEST_CASE("single flow touches only forward channels of its rectangle") {
  const Topology t = build_mesh(4, 4, IoMode::kAllNodes);
  TrafficMatrix m(16);
  m.at(1, 14) = 1.0;
  const auto p = possibility_weights(t, m);
  for (ChannelId id = 0; id < t.num_channels(); ++id) {
    CHECK((p.weight[id] > 0.0) == t.min_rect_contains(1, 14, t.channel(id)));
  }
}

TEST_CASE("possibility weights match path enumeration") {
  std::mt19937_64 rng(2024);
  for (int w = 1; w <= 4; ++w) {
    for (int h = 1; h <= 4; ++h) {
      if (w * h < 2) continue;
      for (IoMode io : {IoMode::kAllNodes, IoMode::kEdgeOnly}) {
        const Topology t = build_mesh(w, h, io);
        if (t.num_io_nodes() < 2) continue;
        for (int trial = 0; trial < 20; ++trial) {
          const TrafficMatrix m = oracle::random_matrix(t, rng);
          const auto want = oracle::possibility_weights(w, h, m);
          const auto got = possibility_weights(t, m);
          for (ChannelId id = 0; id < t.num_channels(); ++id) {
            const auto& c = t.channel(id);
            const oracle::Edge e{c.src, c.dst};
            const double ww = want.weight.count(e) ? want.weight.at(e) : 0.0;
            const double wd = want.drain.count(e) ? want.drain.at(e) : 0.0;
            CHECK(std::abs(got.weight[id] - ww) < 1e-9);
            CHECK(std::abs(got.drain_weight[id] - wd) < 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("transfer probabilities sum to one where traffic leaves") {
  std::mt19937_64 rng(11);
  const Topology t = build_mesh(5, 5, IoMode::kEdgeOnly);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = transition_probabilities(t, oracle::random_matrix(t, rng));
    for (NodeId u = 0; u < t.num_nodes(); ++u) {
      double w = 0.0;
      double sum = 0.0;
      for (ChannelId id : t.out_channels(u)) {
        w += p.weight[id];
        sum += p.transfer[id];
      }
      if (w > 0.0) {
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      } else {
        CHECK(sum == 0.0);
      }
    }
    for (ChannelId id = 0; id < t.num_channels(); ++id) {
      CHECK(p.drain[id] >= 0.0);
      CHECK(p.drain[id] <= 1.0);
    }
  }
}

TEST_CASE("two-node line drains in one step") {
  const Topology t = build_mesh(2, 1, IoMode::kAllNodes);
  const NRankResult r = run_nrank(t, generate_pattern(t, Pattern::kUniform, 1));
  CHECK(r.w0 == std::vector<double>{0.5, 0.5});
  CHECK(r.w_nr[0] == doctest::Approx(1.0));
  CHECK(r.w_nr[1] == doctest::Approx(1.0));
  CHECK(r.iterations == 1);
  CHECK(r.converged);
}

TEST_CASE("huge threshold stops after the first iteration") {
  const Topology t = build_mesh(5, 5, IoMode::kEdgeOnly);
  NRankOptions opt;
  opt.w_th = 1e9;
  const NRankResult r = run_nrank(t, generate_pattern(t, Pattern::kUniform, 1), opt);
  CHECK(r.iterations == 1);
  CHECK(r.converged);
}

TEST_CASE("invalid thresholds") {
  const Topology t = build_mesh(2, 1, IoMode::kAllNodes);
  const TrafficMatrix m = generate_pattern(t, Pattern::kUniform, 1);
  CHECK_THROWS_AS(run_nrank(t, m, {0.0, 100}), Error);
  CHECK_THROWS_AS(run_nrank(t, m, {0.01, 0}), Error);
}

TEST_CASE("evolution matches the reference iteration") {
  std::mt19937_64 rng(77);
  for (int w = 2; w <= 4; ++w) {
    for (int h = 1; h <= 4; ++h) {
      const Topology t = build_mesh(w, h, IoMode::kAllNodes);
      for (int trial = 0; trial < 5; ++trial) {
        const TrafficMatrix m = oracle::random_matrix(t, rng);
        const NRankResult r = run_nrank(t, m);
        const auto want = reference_nrank(w, h, m, r.iterations);
        for (NodeId n = 0; n < t.num_nodes(); ++n) {
          CHECK(std::abs(r.w_nr[n] - want[n]) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("residual never grows") {
  std::mt19937_64 rng(5);
  const Topology t = build_mesh(5, 5, IoMode::kEdgeOnly);
  for (int trial = 0; trial < 10; ++trial) {
    NRankOptions opt;
    opt.w_th = 1e-9;
    const NRankResult r = run_nrank(t, oracle::random_matrix(t, rng), opt);
    REQUIRE(r.residual_history.size() == static_cast<std::size_t>(r.iterations) + 1);
    CHECK(r.residual_history.front() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
      CHECK(r.residual_history[i] <= r.residual_history[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("uniform weights respect the mesh symmetries") {
  for (IoMode io : {IoMode::kAllNodes, IoMode::kEdgeOnly}) {
    const Topology t = build_mesh(5, 5, io);
    const NRankResult r = run_nrank(t, generate_pattern(t, Pattern::kUniform, 1));
    for (NodeId n = 0; n < 25; ++n) {
      const Coord c = t.coord(n);
      const Coord images[] = {{4 - c.x, c.y}, {c.x, 4 - c.y}, {4 - c.x, 4 - c.y},
                              {c.y, c.x},     {4 - c.y, c.x}, {c.y, 4 - c.x},
                              {4 - c.y, 4 - c.x}};
      for (const Coord& img : images) {
        CHECK(r.w_nr[t.node_at(img)] == doctest::Approx(r.w_nr[n]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("corners rank below the centre under uniform all-node traffic") {
  const Topology t = build_mesh(5, 5, IoMode::kAllNodes);
  const NRankResult r = run_nrank(t, generate_pattern(t, Pattern::kUniform, 1));
  CHECK(r.converged);
  double corner_max = 0.0;
  for (NodeId n : {0, 4, 20, 24}) corner_max = std::max(corner_max, r.w_nr[n]);
  for (NodeId n : {7, 11, 12, 13, 17}) CHECK(corner_max < r.w_nr[n]);
}

TEST_CASE("csv writers") {
  const Topology t = build_mesh(2, 1, IoMode::kAllNodes);
  const NRankResult r = run_nrank(t, generate_pattern(t, Pattern::kUniform, 1));
  std::ostringstream a;
  write_nrank_csv(a, r);
  CHECK(a.str() == "node,w0,w_nr\n0,0.5,1\n1,0.5,1\n");
  std::ostringstream b;
  write_convergence_log(b, r);
  CHECK(b.str() == "iteration,residual\n0,1\n1,0\n");
}

}  // namespace
}  // namespace qstar
