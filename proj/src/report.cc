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
#include "qstar/report.h"

#include <algorithm>
#include <numeric>

#include "qstar/metrics.h"

namespace qstar {

double active_lcv(const std::vector<double>& loads) {
  std::vector<double> active;
  for (double v : loads) {
    if (v > 0.0) active.push_back(v);
  }
  if (active.empty()) return 0.0;
  return lcv(active);
}

MetricsReport make_report(const SimResults& res) {
  MetricsReport r;
  r.offered = res.offered;
  r.accepted = res.accepted;
  r.packets = static_cast<std::int64_t>(res.latencies.size());
  r.unfinished = res.unfinished;
  r.deadlock = res.deadlock;
  r.reorder_peak = res.reorder_peak;
  if (!res.latencies.empty()) {
    r.mean_latency =
        std::accumulate(res.latencies.begin(), res.latencies.end(), 0.0) /
        static_cast<double>(res.latencies.size());
    r.max_latency = *std::max_element(res.latencies.begin(), res.latencies.end());
    r.p99_latency = percentile(res.latencies, 99.0);
  }
  const double cycles = static_cast<double>(std::max<std::int64_t>(res.measure_cycles, 1));
  r.node_load.reserve(res.node_forwarded.size());
  for (auto f : res.node_forwarded) r.node_load.push_back(static_cast<double>(f) / cycles);
  r.lcv = active_lcv(r.node_load);
  return r;
}

std::vector<std::pair<std::int64_t, double>> window_lcv(const SimResults& res,
                                                        std::int64_t window) {
  std::vector<std::pair<std::int64_t, double>> out;
  for (std::size_t i = 0; i < res.window_forwarded.size(); ++i) {
    const auto& counts = res.window_forwarded[i];
    std::vector<double> loads(counts.begin(), counts.end());
    if (std::none_of(loads.begin(), loads.end(), [](double v) { return v > 0.0; })) {
      continue;
    }
    out.emplace_back(static_cast<std::int64_t>(i) * window, active_lcv(loads));
  }
  return out;
}

}  // namespace qstar
