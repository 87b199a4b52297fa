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
#ifndef QSTAR_METRICS_H_
#define QSTAR_METRICS_H_

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qstar/topology.h"

namespace qstar {

// Coefficient of variation (population std-dev / mean). Throws when `loads`
// is empty or sums to zero.
double lcv(std::span<const double> loads);

// Nearest-rank percentile, p in [0, 100]. Returns 0 for an empty sample.
double percentile(std::vector<double> samples, double p);

struct EjectionEvent {
  std::int64_t cycle = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::int64_t seq = 0;  // packet sequence number within its flow
  int packet_flits = 1;
};

// Virtual destination-side reorder buffers. A flit is held while any
// earlier packet of its flow is not fully ejected; held flits are released
// as soon as every predecessor has completed. Occupancy is counted in flits.
class ReorderTracker {
 public:
  explicit ReorderTracker(int num_nodes);

  // Flits of one packet must be reported in order.
  void on_eject(NodeId src, NodeId dst, std::int64_t seq, int packet_flits);

  int occupancy(NodeId dst) const { return occupancy_[dst]; }
  int current_max() const;
  int peak() const { return peak_; }
  // Highest occupancy seen since the previous call.
  int take_window_peak();

 private:
  struct PacketProgress {
    int ejected = 0;
    int held = 0;
    bool complete = false;
  };
  struct FlowState {
    std::int64_t next_expected = 0;
    std::map<std::int64_t, PacketProgress> packets;
  };

  int num_nodes_;
  std::unordered_map<std::int64_t, FlowState> flows_;
  std::vector<int> occupancy_;
  int peak_ = 0;
  int window_peak_ = 0;
};

struct ReorderSummary {
  int peak = 0;
  // (cycle, max occupancy over destinations) after each cycle that changed it.
  std::vector<std::pair<std::int64_t, int>> series;
};

// Replays time-ordered ejection events through a ReorderTracker.
ReorderSummary reorder_trace(std::span<const EjectionEvent> events,
                             int num_nodes);

struct LoadPoint {
  double rate = 0.0;          // nominal offered rate
  double offered = 0.0;       // measured offered rate; 0 means use `rate`
  double accepted = 0.0;
  double mean_latency = 0.0;
};

enum class SaturationStatus { kOk, kNeverSaturated, kAlwaysSaturated };

struct SaturationEstimate {
  double rate = 0.0;
  SaturationStatus status = SaturationStatus::kOk;
};

// Largest nominal rate such that it and every lower rate in the series
// accept at least `accept_fraction` of the offered load with mean latency
// under `latency_cap_factor` times the lowest-rate latency.
SaturationEstimate saturation_throughput(std::span<const LoadPoint> series,
                                         double latency_cap_factor = 10.0,
                                         double accept_fraction = 0.99);

}  // namespace qstar

#endif  // QSTAR_METRICS_H_
