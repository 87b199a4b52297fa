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
// Writes the skewed hotspot trace used by the acceptance suite. See
// docs/hotspot_trace.md for the flow set and its channel-load analysis.
//
//   gen_hotspot_trace [output.csv]
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include "qstar/traffic.h"

namespace {

struct Flow {
  int src;
  int dst;
  double rate;  // flits per cycle
};

// 5x5 mesh, row-major numbering, node 0 at the bottom-left corner.
constexpr Flow kFlows[] = {
    {0, 4, 0.40},    // along the bottom row
    {1, 24, 0.12},   // bottom row to the top-right corner
    {2, 19, 0.12},
    {0, 14, 0.12},
    {1, 23, 0.12},
};
constexpr int kCycles = 20000;
constexpr int kPacketFlits = 4;
constexpr std::uint64_t kSeed = 7;

}  // namespace

int main(int argc, char** argv) {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<qstar::TraceEvent> events;
  for (int cycle = 0; cycle < kCycles; ++cycle) {
    for (const Flow& f : kFlows) {
      if (unit(rng) < f.rate / kPacketFlits) {
        events.push_back({cycle, f.src, f.dst, kPacketFlits});
      }
    }
  }
  const qstar::Trace trace(25, std::move(events));
  if (argc > 1) {
    std::ofstream out(argv[1]);
    if (!out) {
      std::cerr << "cannot write " << argv[1] << '\n';
      return 1;
    }
    qstar::write_trace(out, trace);
  } else {
    qstar::write_trace(std::cout, trace);
  }
  return 0;
}
