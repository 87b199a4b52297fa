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
#ifndef QSTAR_TRAFFIC_H_
#define QSTAR_TRAFFIC_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "qstar/topology.h"

namespace qstar {

// |N| x |N| matrix of traffic fractions; entry (s, d) is the share of all
// traffic sent from s to d.
class TrafficMatrix {
 public:
  TrafficMatrix() = default;
  explicit TrafficMatrix(int num_nodes);

  int size() const { return n_; }
  double operator()(NodeId s, NodeId d) const { return v_[index(s, d)]; }
  double& at(NodeId s, NodeId d) { return v_[index(s, d)]; }
  std::span<const double> row(NodeId s) const {
    return {v_.data() + static_cast<std::size_t>(s) * n_,
            static_cast<std::size_t>(n_)};
  }
  double row_sum(NodeId s) const;
  double total() const;

  friend bool operator==(const TrafficMatrix&, const TrafficMatrix&) = default;

 private:
  std::size_t index(NodeId s, NodeId d) const {
    return static_cast<std::size_t>(s) * n_ + d;
  }

  int n_ = 0;
  std::vector<double> v_;
};

// Scales entries to sum to one. Diagonal entries are dropped (with a warning
// on stderr) since self-traffic never enters the network. Throws on negative
// entries or when nothing positive remains.
TrafficMatrix normalize(const TrafficMatrix& m);

// Throws unless `m` is sized for `topo`, non-negative, and silent on every
// node that has no I/O port.
void validate_for(const TrafficMatrix& m, const Topology& topo);

enum class Pattern : std::uint8_t { kUniform, kShuffle, kPermutation, kOverturn };
Pattern parse_pattern(std::string_view text);
std::string_view to_string(Pattern pattern);

// Synthetic traffic over the topology's I/O nodes, normalized.
//   uniform      every ordered pair of distinct I/O nodes, equal weight
//   shuffle      left bit-rotation of the I/O index (power-of-two counts only)
//   permutation  seeded random permutation of the I/O nodes
//   overturn     point reflection (x, y) -> (w-1-x, h-1-y)
// Pairs that map a node onto itself are dropped.
TrafficMatrix generate_pattern(const Topology& topo, Pattern pattern,
                               std::uint64_t seed);

// CSV: one row per source, comma-separated non-negative values.
TrafficMatrix parse_matrix(std::istream& in, const Topology& topo);
TrafficMatrix load_matrix(const std::filesystem::path& path,
                          const Topology& topo);
void write_matrix(std::ostream& out, const TrafficMatrix& m);

struct TraceEvent {
  std::int64_t cycle = 0;
  NodeId src = 0;
  NodeId dst = 0;
  int flits = 1;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

class Trace {
 public:
  Trace(int num_nodes, std::vector<TraceEvent> events);

  const std::vector<TraceEvent>& events() const { return events_; }
  bool empty() const { return events_.empty(); }
  // Flit-weighted empirical traffic matrix. Throws for an empty trace.
  TrafficMatrix matrix() const;

 private:
  int num_nodes_;
  std::vector<TraceEvent> events_;
};

// CSV with header `cycle,src,dst,flits`, sorted by cycle.
Trace parse_trace(std::istream& in, const Topology& topo);
Trace load_trace(const std::filesystem::path& path, const Topology& topo);
void write_trace(std::ostream& out, const Trace& trace);

struct PacketRequest {
  NodeId src;
  NodeId dst;
  int flits;
};

// Matrix-driven Bernoulli packet source. Each I/O node with a non-zero row
// draws a packet with probability proportional to its row share, scaled so
// the mean offered load over active sources is `rate` flits/node/cycle;
// destinations follow the row distribution.
class BernoulliSource {
 public:
  BernoulliSource(const TrafficMatrix& m, double rate, int packet_flits);

  void generate(std::mt19937_64& rng, std::vector<PacketRequest>& out) const;

  double packet_probability(NodeId src) const { return prob_[src]; }
  int active_sources() const { return active_; }

 private:
  int packet_flits_;
  int active_ = 0;
  std::vector<double> prob_;
  std::vector<std::vector<double>> cdf_;
  std::vector<std::vector<NodeId>> targets_;
};

}  // namespace qstar

#endif  // QSTAR_TRAFFIC_H_
