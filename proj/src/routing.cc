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
#include "qstar/routing.h"

#include <algorithm>
#include <string>
#include <vector>

namespace qstar {

Algorithm parse_algorithm(std::string_view text) {
  if (text == "xy") return Algorithm::kXY;
  if (text == "yx") return Algorithm::kYX;
  if (text == "bidor") return Algorithm::kBiDOR;
  if (text == "o1turn") return Algorithm::kO1Turn;
  if (text == "romm") return Algorithm::kROMM;
  if (text == "valiant") return Algorithm::kValiant;
  if (text == "oddeven") return Algorithm::kOddEven;
  throw Error("unknown routing algorithm '" + std::string(text) + "'");
}

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kXY: return "xy";
    case Algorithm::kYX: return "yx";
    case Algorithm::kBiDOR: return "bidor";
    case Algorithm::kO1Turn: return "o1turn";
    case Algorithm::kROMM: return "romm";
    case Algorithm::kValiant: return "valiant";
    case Algorithm::kOddEven: return "oddeven";
  }
  return "?";
}

bool is_single_path(Algorithm algo) {
  return algo == Algorithm::kXY || algo == Algorithm::kYX ||
         algo == Algorithm::kBiDOR;
}

Port dor_port(const Topology& topo, NodeId router, NodeId dst,
              DorOrder order) {
  const Coord c = topo.coord(router);
  const Coord d = topo.coord(dst);
  auto x_port = [&] { return d.x > c.x ? Port::kEast : Port::kWest; };
  auto y_port = [&] { return d.y > c.y ? Port::kNorth : Port::kSouth; };
  if (order == DorOrder::kXY) {
    if (c.x != d.x) return x_port();
    if (c.y != d.y) return y_port();
  } else {
    if (c.y != d.y) return y_port();
    if (c.x != d.x) return x_port();
  }
  return Port::kLocal;
}

RouteState plan_route(Algorithm algo, const Topology& topo, NodeId src,
                      NodeId dst, const RouteBitmaps* bitmaps,
                      std::mt19937_64& rng) {
  RouteState state;
  switch (algo) {
    case Algorithm::kXY:
    case Algorithm::kOddEven:
      break;
    case Algorithm::kYX:
      state.order = DorOrder::kYX;
      break;
    case Algorithm::kBiDOR:
      if (bitmaps == nullptr) throw Error("BiDOR routing needs route bitmaps");
      state.order = bitmaps->lookup(src, dst);
      break;
    case Algorithm::kO1Turn:
      state.order = std::bernoulli_distribution(0.5)(rng) ? DorOrder::kYX
                                                          : DorOrder::kXY;
      break;
    case Algorithm::kROMM:
    case Algorithm::kValiant: {
      const Coord s = topo.coord(src);
      const Coord d = topo.coord(dst);
      Coord lo{0, 0};
      Coord hi{topo.width() - 1, topo.height() - 1};
      if (algo == Algorithm::kROMM) {
        lo = {std::min(s.x, d.x), std::min(s.y, d.y)};
        hi = {std::max(s.x, d.x), std::max(s.y, d.y)};
      }
      const int x = std::uniform_int_distribution<int>(lo.x, hi.x)(rng);
      const int y = std::uniform_int_distribution<int>(lo.y, hi.y)(rng);
      state.intermediate = topo.node_at({x, y});
      // A degenerate intermediate collapses the route to its second phase.
      state.phase =
          (state.intermediate == src || state.intermediate == dst) ? 1 : 0;
      break;
    }
  }
  return state;
}

std::vector<Port> odd_even_ports(const Topology& topo, NodeId router,
                                 NodeId src, NodeId dst) {
  const Coord c = topo.coord(router);
  const Coord s = topo.coord(src);
  const Coord d = topo.coord(dst);
  const int dx = d.x - c.x;
  const int dy = d.y - c.y;
  std::vector<Port> ports;
  if (dx == 0 && dy == 0) {
    ports.push_back(Port::kLocal);
    return ports;
  }
  const Port vertical = dy > 0 ? Port::kNorth : Port::kSouth;
  const bool odd_column = (c.x % 2) != 0;
  if (dx == 0) {
    ports.push_back(vertical);
  } else if (dx > 0) {
    if (dy == 0) {
      ports.push_back(Port::kEast);
    } else {
      // East-to-vertical turns are forbidden in even columns.
      if (odd_column || c.x == s.x) ports.push_back(vertical);
      // Avoid arriving at an even destination column still needing a turn.
      if ((d.x % 2) != 0 || dx != 1) ports.push_back(Port::kEast);
    }
  } else {
    ports.push_back(Port::kWest);
    // Vertical-to-west turns are forbidden in odd columns.
    if (dy != 0 && !odd_column) ports.push_back(vertical);
  }
  return ports;
}

RouteDecision route_next(Algorithm algo, const Topology& topo, NodeId router,
                         NodeId src, NodeId dst, RouteState& state,
                         const CreditView& credits) {
  switch (algo) {
    case Algorithm::kXY:
      return {dor_port(topo, router, dst, DorOrder::kXY), kAnyVcClass};
    case Algorithm::kYX:
      return {dor_port(topo, router, dst, DorOrder::kYX), kAnyVcClass};
    case Algorithm::kBiDOR:
    case Algorithm::kO1Turn:
      return {dor_port(topo, router, dst, state.order),
              static_cast<std::uint8_t>(state.order)};
    case Algorithm::kROMM:
    case Algorithm::kValiant: {
      if (state.phase == 0 && router == state.intermediate) state.phase = 1;
      const NodeId target = state.phase == 0 ? state.intermediate : dst;
      return {dor_port(topo, router, target, DorOrder::kXY), state.phase};
    }
    case Algorithm::kOddEven: {
      const auto ports = odd_even_ports(topo, router, src, dst);
      Port best = ports.front();
      for (Port p : ports) {
        if (p == Port::kLocal) return {p, kAnyVcClass};
        const int free = credits[static_cast<int>(p)];
        const int best_free = credits[static_cast<int>(best)];
        const bool p_is_x = p == Port::kEast || p == Port::kWest;
        if (free > best_free || (free == best_free && p_is_x)) best = p;
      }
      return {best, kAnyVcClass};
    }
  }
  return {};
}

}  // namespace qstar
