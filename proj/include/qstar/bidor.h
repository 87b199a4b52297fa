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
#ifndef QSTAR_BIDOR_H_
#define QSTAR_BIDOR_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "qstar/nrank.h"
#include "qstar/topology.h"

namespace qstar {

// One |N|-bit vector per source node. Bit (s, d) = 0 routes s->d along XY,
// 1 along YX.
class RouteBitmaps {
 public:
  RouteBitmaps() = default;
  explicit RouteBitmaps(int num_nodes)
      : n_(num_nodes), bits_(static_cast<std::size_t>(num_nodes) * num_nodes) {}

  int size() const { return n_; }
  bool bit(NodeId s, NodeId d) const { return bits_[index(s, d)]; }
  void set(NodeId s, NodeId d, bool value) { bits_[index(s, d)] = value; }
  DorOrder lookup(NodeId s, NodeId d) const {
    return bit(s, d) ? DorOrder::kYX : DorOrder::kXY;
  }
  int count_yx() const;

  friend bool operator==(const RouteBitmaps&, const RouteBitmaps&) = default;

 private:
  std::size_t index(NodeId s, NodeId d) const {
    return static_cast<std::size_t>(s) * n_ + d;
  }

  int n_ = 0;
  std::vector<bool> bits_;
};

// Sum of per-node weights along `path`, endpoints included.
double route_cost(std::span<const NodeId> path, std::span<const double> w_nr);

// Picks, for every ordered pair of I/O nodes, the DOR order whose path has
// the smaller total weight. Equal costs keep XY.
RouteBitmaps compute_bitmaps(const Topology& topo, std::span<const double> w_nr);
RouteBitmaps compute_bitmaps(const Topology& topo, const NRankResult& nr);

// Text format: one line per source, |N| characters of '0'/'1'.
void write_bitmaps(std::ostream& out, const RouteBitmaps& bm);
RouteBitmaps read_bitmaps(std::istream& in, int num_nodes);
void export_bitmaps(const RouteBitmaps& bm, const std::filesystem::path& path);
RouteBitmaps import_bitmaps(const std::filesystem::path& path, int num_nodes);

}  // namespace qstar

#endif  // QSTAR_BIDOR_H_
