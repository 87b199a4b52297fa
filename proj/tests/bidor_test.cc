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
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "qstar/bidor.h"
#include "qstar/nrank.h"
#include "qstar/topology.h"
#include "qstar/traffic.h"

namespace qstar {
namespace {

// 4x4 weights giving the pair (11, 4) path costs of 1.57 (XY) and 2.17 (YX).
std::vector<double> two_path_weights() {
  std::vector<double> w(16, 0.3);
  w[11] = 0.1;
  w[4] = 0.1;
  w[10] = 0.45;
  w[9] = 0.46;
  w[8] = 0.46;
  w[7] = 0.65;
  w[6] = 0.66;
  w[5] = 0.66;
  return w;
}

// Cost of a dimension-order route summed cell by cell from coordinates.
double walk_cost(int width, NodeId s, NodeId d, bool y_first,
                 const std::vector<double>& w) {
  int x = s % width, y = s / width;
  const int dx = d % width, dy = d / width;
  double cost = w[s];
  auto step_x = [&] {
    while (x != dx) {
      x += dx > x ? 1 : -1;
      cost += w[y * width + x];
    }
  };
  auto step_y = [&] {
    while (y != dy) {
      y += dy > y ? 1 : -1;
      cost += w[y * width + x];
    }
  };
  if (y_first) {
    step_y();
    step_x();
  } else {
    step_x();
    step_y();
  }
  return cost;
}

TEST_CASE("route costs include both endpoints") {
  const Topology t = build_mesh(4, 4, IoMode::kAllNodes);
  const auto w = two_path_weights();
  CHECK(route_cost(t.dor_path(11, 4, DorOrder::kXY), w) == doctest::Approx(1.57));
  CHECK(route_cost(t.dor_path(11, 4, DorOrder::kYX), w) == doctest::Approx(2.17));
  const std::vector<double> one{0.3};
  const std::vector<NodeId> single{0};
  CHECK(route_cost(single, one) == doctest::Approx(0.3));
}

TEST_CASE("cheaper XY route keeps bit zero") {
  const Topology t = build_mesh(4, 4, IoMode::kAllNodes);
  const RouteBitmaps bm = compute_bitmaps(t, two_path_weights());
  CHECK_FALSE(bm.bit(11, 4));
  CHECK(bm.lookup(11, 4) == DorOrder::kXY);
  CHECK(bm.lookup(11, 4) == bm.lookup(11, 4));
}

TEST_CASE("loaded XY route flips to YX") {
  const Topology t = build_mesh(4, 4, IoMode::kAllNodes);
  auto w = two_path_weights();
  w[9] = 2.0;
  const RouteBitmaps bm = compute_bitmaps(t, w);
  CHECK(bm.lookup(11, 4) == DorOrder::kYX);
}

TEST_CASE("ties and shared lines stay on XY") {
  const Topology t = build_mesh(5, 5, IoMode::kAllNodes);
  const std::vector<double> flat(25, 0.7);
  CHECK(compute_bitmaps(t, flat).count_yx() == 0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(25);
  for (auto& v : w) v = u(rng);
  const RouteBitmaps bm = compute_bitmaps(t, w);
  for (NodeId s = 0; s < 25; ++s) {
    for (NodeId d = 0; d < 25; ++d) {
      if (s % 5 == d % 5 || s / 5 == d / 5) CHECK_FALSE(bm.bit(s, d));
    }
  }
}

TEST_CASE("bits match the walked costs") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (IoMode io : {IoMode::kAllNodes, IoMode::kEdgeOnly}) {
    const Topology t = build_mesh(5, 4, io);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> w(t.num_nodes());
      for (auto& v : w) v = u(rng);
      const RouteBitmaps bm = compute_bitmaps(t, w);
      for (NodeId s = 0; s < t.num_nodes(); ++s) {
        for (NodeId d = 0; d < t.num_nodes(); ++d) {
          bool want = false;
          if (s != d && t.is_io(s) && t.is_io(d)) {
            want = walk_cost(5, s, d, true, w) < walk_cost(5, s, d, false, w);
          }
          CHECK(bm.bit(s, d) == want);
        }
      }
    }
  }
}

TEST_CASE("bitmaps ignore positive scaling") {
  const Topology t = build_mesh(5, 5, IoMode::kEdgeOnly);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const NRankResult nr = run_nrank(t, oracle::random_matrix(t, rng));
    std::vector<double> doubled = nr.w_nr;
    for (auto& v : doubled) v *= 2.0;
    CHECK(compute_bitmaps(t, nr) == compute_bitmaps(t, doubled));
  }
}

TEST_CASE("endpoint weights do not affect their own pair") {
  const Topology t = build_mesh(5, 5, IoMode::kAllNodes);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(25);
  for (auto& v : w) v = u(rng);
  const RouteBitmaps base = compute_bitmaps(t, w);
  for (NodeId s = 0; s < 25; ++s) {
    for (NodeId d = 0; d < 25; ++d) {
      if (s == d) continue;
      auto v = w;
      v[s] += 5.0;
      v[d] += 3.0;
      CHECK(compute_bitmaps(t, v).bit(s, d) == base.bit(s, d));
    }
  }
}

TEST_CASE("bitmap files") {
  const Topology t = build_mesh(5, 5, IoMode::kEdgeOnly);
  const NRankResult nr = run_nrank(t, generate_pattern(t, Pattern::kUniform, 1));
  const RouteBitmaps bm = compute_bitmaps(t, nr);

  std::stringstream buf;
  write_bitmaps(buf, bm);
  const std::string text = buf.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 25);
  CHECK(text.find('\n') == 25);
  CHECK(read_bitmaps(buf, 25) == bm);

  const auto path = std::filesystem::temp_directory_path() / "qstar_bitmaps_test.txt";
  export_bitmaps(bm, path);
  CHECK(import_bitmaps(path, 25) == bm);

  std::ofstream(path) << text.substr(0, text.size() / 2);
  CHECK_THROWS_AS(import_bitmaps(path, 25), Error);
  std::filesystem::remove(path);

  std::istringstream bad(std::string(24, '0') + "2\n");
  CHECK_THROWS_AS(read_bitmaps(bad, 25), Error);
  std::istringstream narrow("010\n");
  CHECK_THROWS_AS(read_bitmaps(narrow, 25), Error);
  CHECK_THROWS_AS(import_bitmaps("/nonexistent/bitmaps.txt", 25), Error);
}

}  // namespace
}  // namespace qstar
