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
#ifndef QSTAR_REPORT_H_
#define QSTAR_REPORT_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "qstar/simulator.h"

namespace qstar {

struct MetricsReport {
  double offered = 0.0;
  double accepted = 0.0;
  double mean_latency = 0.0;
  double p99_latency = 0.0;
  double max_latency = 0.0;
  // Over nodes that switched at least one flit; 0 when nothing moved.
  double lcv = 0.0;
  int reorder_peak = 0;
  // Flits switched per measurement cycle, per node.
  std::vector<double> node_load;
  std::int64_t packets = 0;
  std::int64_t unfinished = 0;
  bool deadlock = false;
};

MetricsReport make_report(const SimResults& res);

// LCV of the node loads restricted to nodes with non-zero load.
double active_lcv(const std::vector<double>& loads);

// (window start, LCV) for every sample window that carried traffic.
std::vector<std::pair<std::int64_t, double>> window_lcv(const SimResults& res,
                                                        std::int64_t window);

}  // namespace qstar

#endif  // QSTAR_REPORT_H_
