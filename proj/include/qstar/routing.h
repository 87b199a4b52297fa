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
#ifndef QSTAR_ROUTING_H_
#define QSTAR_ROUTING_H_

#include <array>
#include <cstdint>
#include <random>
#include <string_view>

#include "qstar/bidor.h"
#include "qstar/topology.h"

namespace qstar {

enum class Algorithm : std::uint8_t {
  kXY,
  kYX,
  kBiDOR,
  kO1Turn,
  kROMM,
  kValiant,
  kOddEven,
};

Algorithm parse_algorithm(std::string_view text);
std::string_view to_string(Algorithm algo);

// Algorithms whose flows always take one fixed path.
bool is_single_path(Algorithm algo);

inline constexpr std::uint8_t kAnyVcClass = 0xff;

// Per-packet routing memo chosen at the source.
struct RouteState {
  DorOrder order = DorOrder::kXY;
  NodeId intermediate = -1;
  std::uint8_t phase = 0;
};

struct RouteDecision {
  Port port = Port::kLocal;
  // 0 or 1 restricts the packet to that VC class; kAnyVcClass allows all.
  std::uint8_t vc_class = kAnyVcClass;
  friend bool operator==(const RouteDecision&, const RouteDecision&) = default;
};

// Free downstream credits per mesh output port, summed over VCs.
using CreditView = std::array<int, kNumMeshPorts>;

// Source-side decisions: bitmap lookup (BiDOR), orientation coin (O1Turn),
// intermediate node (ROMM, Valiant). `bitmaps` is required for BiDOR.
RouteState plan_route(Algorithm algo, const Topology& topo, NodeId src,
                      NodeId dst, const RouteBitmaps* bitmaps,
                      std::mt19937_64& rng);

// Output port and VC class for a head flit at `router`. May advance the
// phase of a two-phase route; calling it again at the same router returns
// the same decision.
RouteDecision route_next(Algorithm algo, const Topology& topo, NodeId router,
                         NodeId src, NodeId dst, RouteState& state,
                         const CreditView& credits);

// Minimal odd-even admissible output ports (Local when router == dst).
std::vector<Port> odd_even_ports(const Topology& topo, NodeId router,
                                 NodeId src, NodeId dst);

// First hop of dimension-order routing from `router` toward `dst`.
Port dor_port(const Topology& topo, NodeId router, NodeId dst, DorOrder order);

}  // namespace qstar

#endif  // QSTAR_ROUTING_H_
