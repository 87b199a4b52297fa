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
#include "qstar/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qstar {

double lcv(std::span<const double> loads) {
  if (loads.empty()) throw Error("LCV of an empty load vector");
  const double n = static_cast<double>(loads.size());
  const double mean = std::accumulate(loads.begin(), loads.end(), 0.0) / n;
  if (!(mean > 0.0)) throw Error("LCV undefined for all-zero loads");
  double var = 0.0;
  for (double v : loads) var += (v - mean) * (v - mean);
  return std::sqrt(var / n) / mean;
}

double percentile(std::vector<double> samples, double p) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return samples[rank - 1];
}

ReorderTracker::ReorderTracker(int num_nodes)
    : num_nodes_(num_nodes), occupancy_(num_nodes, 0) {}

void ReorderTracker::on_eject(NodeId src, NodeId dst, std::int64_t seq,
                              int packet_flits) {
  FlowState& flow =
      flows_[static_cast<std::int64_t>(src) * num_nodes_ + dst];
  PacketProgress& pkt = flow.packets[seq];
  ++pkt.ejected;
  if (seq > flow.next_expected) {
    ++pkt.held;
    ++occupancy_[dst];
    peak_ = std::max(peak_, occupancy_[dst]);
    window_peak_ = std::max(window_peak_, occupancy_[dst]);
  }
  if (pkt.ejected < packet_flits) return;
  pkt.complete = true;

  auto it = flow.packets.begin();
  while (it != flow.packets.end() && it->first == flow.next_expected &&
         it->second.complete) {
    occupancy_[dst] -= it->second.held;
    it = flow.packets.erase(it);
    ++flow.next_expected;
  }
  // The new head of the flow is no longer blocked.
  if (it != flow.packets.end() && it->first == flow.next_expected) {
    occupancy_[dst] -= it->second.held;
    it->second.held = 0;
  }
}

int ReorderTracker::current_max() const {
  return *std::max_element(occupancy_.begin(), occupancy_.end());
}

int ReorderTracker::take_window_peak() {
  const int value = window_peak_;
  window_peak_ = current_max();
  return value;
}

ReorderSummary reorder_trace(std::span<const EjectionEvent> events,
                             int num_nodes) {
  ReorderTracker tracker(num_nodes);
  ReorderSummary out;
  int last = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    tracker.on_eject(e.src, e.dst, e.seq, e.packet_flits);
    const bool cycle_done =
        i + 1 == events.size() || events[i + 1].cycle != e.cycle;
    if (!cycle_done) continue;
    const int now = tracker.current_max();
    if (now != last) {
      out.series.emplace_back(e.cycle, now);
      last = now;
    }
  }
  out.peak = tracker.peak();
  return out;
}

SaturationEstimate saturation_throughput(std::span<const LoadPoint> series,
                                         double latency_cap_factor,
                                         double accept_fraction) {
  SaturationEstimate est;
  if (series.empty()) {
    est.status = SaturationStatus::kAlwaysSaturated;
    return est;
  }
  std::vector<LoadPoint> points(series.begin(), series.end());
  std::sort(points.begin(), points.end(),
            [](const LoadPoint& a, const LoadPoint& b) { return a.rate < b.rate; });
  const double cap = latency_cap_factor * points.front().mean_latency;
  auto ok = [&](const LoadPoint& p) {
    const double offered = p.offered > 0.0 ? p.offered : p.rate;
    return p.accepted >= accept_fraction * offered && p.mean_latency < cap;
  };
  std::size_t good = 0;
  while (good < points.size() && ok(points[good])) ++good;
  if (good == 0) {
    est.status = SaturationStatus::kAlwaysSaturated;
    return est;
  }
  est.rate = points[good - 1].rate;
  est.status = good == points.size() ? SaturationStatus::kNeverSaturated
                                     : SaturationStatus::kOk;
  return est;
}

}  // namespace qstar
