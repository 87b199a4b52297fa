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
#include "qstar/bidor.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>

namespace qstar {

int RouteBitmaps::count_yx() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), true));
}

double route_cost(std::span<const NodeId> path, std::span<const double> w_nr) {
  double cost = 0.0;
  for (NodeId n : path) cost += w_nr[n];
  return cost;
}

RouteBitmaps compute_bitmaps(const Topology& topo,
                             std::span<const double> w_nr) {
  if (static_cast<int>(w_nr.size()) != topo.num_nodes()) {
    throw Error(fmt::format("need {} node weights, got {}", topo.num_nodes(),
                            w_nr.size()));
  }
  RouteBitmaps bm(topo.num_nodes());
  for (NodeId s : topo.io_nodes()) {
    for (NodeId d : topo.io_nodes()) {
      if (s == d) continue;
      const Coord cs = topo.coord(s);
      const Coord cd = topo.coord(d);
      if (cs.x == cd.x || cs.y == cd.y) continue;
      const double xy = route_cost(topo.dor_path(s, d, DorOrder::kXY), w_nr);
      const double yx = route_cost(topo.dor_path(s, d, DorOrder::kYX), w_nr);
      bm.set(s, d, yx < xy);
    }
  }
  return bm;
}

RouteBitmaps compute_bitmaps(const Topology& topo, const NRankResult& nr) {
  return compute_bitmaps(topo, nr.w_nr);
}

void write_bitmaps(std::ostream& out, const RouteBitmaps& bm) {
  std::string line(bm.size(), '0');
  for (NodeId s = 0; s < bm.size(); ++s) {
    for (NodeId d = 0; d < bm.size(); ++d) line[d] = bm.bit(s, d) ? '1' : '0';
    out << line << '\n';
  }
}

RouteBitmaps read_bitmaps(std::istream& in, int num_nodes) {
  RouteBitmaps bm(num_nodes);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= num_nodes) {
      throw Error(fmt::format("bitmap file has more than {} lines", num_nodes));
    }
    if (static_cast<int>(line.size()) != num_nodes) {
      throw Error(fmt::format("bitmap line {} has {} bits, expected {}", row,
                              line.size(), num_nodes));
    }
    for (int d = 0; d < num_nodes; ++d) {
      if (line[d] != '0' && line[d] != '1') {
        throw Error(fmt::format("bitmap line {}, column {}: '{}' is not 0 or 1",
                                row, d, line[d]));
      }
      bm.set(row, d, line[d] == '1');
    }
    ++row;
  }
  if (row != num_nodes) {
    throw Error(fmt::format("bitmap file has {} lines, expected {}", row,
                            num_nodes));
  }
  return bm;
}

void export_bitmaps(const RouteBitmaps& bm, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_bitmaps(out, bm);
}

RouteBitmaps import_bitmaps(const std::filesystem::path& path, int num_nodes) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return read_bitmaps(in, num_nodes);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace qstar
