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
#include "qstar/topology.h"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace qstar {

namespace {

constexpr std::array<Coord, kNumMeshPorts> kPortOffset = {
    Coord{1, 0}, Coord{-1, 0}, Coord{0, 1}, Coord{0, -1}};

bool in_range(int v, int a, int b) {
  return v >= std::min(a, b) && v <= std::max(a, b);
}

}  // namespace

std::string_view to_string(Port port) {
  switch (port) {
    case Port::kEast: return "east";
    case Port::kWest: return "west";
    case Port::kNorth: return "north";
    case Port::kSouth: return "south";
    case Port::kLocal: return "local";
  }
  return "?";
}

std::string_view to_string(DorOrder order) {
  return order == DorOrder::kXY ? "XY" : "YX";
}

IoMode parse_io_mode(std::string_view text) {
  if (text == "all_nodes") return IoMode::kAllNodes;
  if (text == "edge_only") return IoMode::kEdgeOnly;
  throw Error("unknown io_mode '" + std::string(text) +
              "' (expected all_nodes or edge_only)");
}

std::string_view to_string(IoMode mode) {
  return mode == IoMode::kAllNodes ? "all_nodes" : "edge_only";
}

Topology::Topology(int width, int height, IoMode io_mode)
    : width_(width), height_(height), io_mode_(io_mode) {
  if (width < 1 || height < 1) {
    throw Error("mesh dimensions must be positive, got " +
                std::to_string(width) + "x" + std::to_string(height));
  }
  if (width * height < 2) {
    throw Error("mesh needs at least two nodes to carry traffic");
  }
  const int n = num_nodes();
  port_channel_.assign(n, {-1, -1, -1, -1});
  upstream_.resize(n);
  downstream_.resize(n);
  in_channels_.resize(n);
  out_channels_.resize(n);
  for (NodeId node = 0; node < n; ++node) {
    const Coord c = coord(node);
    for (int p = 0; p < kNumMeshPorts; ++p) {
      const Coord next{c.x + kPortOffset[p].x, c.y + kPortOffset[p].y};
      if (!contains(next)) continue;
      const NodeId dst = node_at(next);
      const auto id = static_cast<ChannelId>(channels_.size());
      channels_.push_back({node, dst});
      port_channel_[node][p] = id;
    }
  }
  for (ChannelId id = 0; id < num_channels(); ++id) {
    const Channel& ch = channels_[id];
    downstream_[ch.src].push_back(ch.dst);
    out_channels_[ch.src].push_back(id);
    upstream_[ch.dst].push_back(ch.src);
    in_channels_[ch.dst].push_back(id);
  }
  io_mask_.assign(n, false);
  for (NodeId node = 0; node < n; ++node) {
    const Coord c = coord(node);
    const bool edge =
        c.x == 0 || c.y == 0 || c.x == width_ - 1 || c.y == height_ - 1;
    if (io_mode_ == IoMode::kAllNodes || edge) {
      io_mask_[node] = true;
      io_nodes_.push_back(node);
    }
  }
}

int Topology::manhattan(NodeId a, NodeId b) const {
  const Coord ca = coord(a);
  const Coord cb = coord(b);
  return std::abs(ca.x - cb.x) + std::abs(ca.y - cb.y);
}

std::optional<ChannelId> Topology::channel_at(NodeId node, Port port) const {
  if (port == Port::kLocal) return std::nullopt;
  const ChannelId id = port_channel_[node][static_cast<int>(port)];
  if (id < 0) return std::nullopt;
  return id;
}

std::optional<ChannelId> Topology::find_channel(NodeId src, NodeId dst) const {
  for (ChannelId id : out_channels_[src]) {
    if (channels_[id].dst == dst) return id;
  }
  return std::nullopt;
}

std::optional<NodeId> Topology::neighbor(NodeId node, Port port) const {
  const auto id = channel_at(node, port);
  if (!id) return std::nullopt;
  return channels_[*id].dst;
}

Port Topology::port_toward(NodeId from, NodeId to) const {
  const Coord a = coord(from);
  const Coord b = coord(to);
  if (b.x == a.x + 1 && b.y == a.y) return Port::kEast;
  if (b.x == a.x - 1 && b.y == a.y) return Port::kWest;
  if (b.y == a.y + 1 && b.x == a.x) return Port::kNorth;
  if (b.y == a.y - 1 && b.x == a.x) return Port::kSouth;
  throw Error("nodes " + std::to_string(from) + " and " + std::to_string(to) +
              " are not adjacent");
}

bool Topology::min_rect_contains(NodeId s, NodeId d, const Channel& c) const {
  const Coord cs = coord(s);
  const Coord cd = coord(d);
  for (NodeId end : {c.src, c.dst}) {
    const Coord p = coord(end);
    if (!in_range(p.x, cs.x, cd.x) || !in_range(p.y, cs.y, cd.y)) return false;
  }
  return manhattan(c.dst, d) < manhattan(c.src, d);
}

std::vector<NodeId> Topology::dor_path(NodeId s, NodeId d,
                                       DorOrder order) const {
  Coord cur = coord(s);
  const Coord target = coord(d);
  std::vector<NodeId> path;
  path.reserve(manhattan(s, d) + 1);
  path.push_back(s);
  auto walk_x = [&] {
    while (cur.x != target.x) {
      cur.x += target.x > cur.x ? 1 : -1;
      path.push_back(node_at(cur));
    }
  };
  auto walk_y = [&] {
    while (cur.y != target.y) {
      cur.y += target.y > cur.y ? 1 : -1;
      path.push_back(node_at(cur));
    }
  };
  if (order == DorOrder::kXY) {
    walk_x();
    walk_y();
  } else {
    walk_y();
    walk_x();
  }
  return path;
}

Topology build_mesh(int width, int height, IoMode io_mode) {
  return Topology(width, height, io_mode);
}

}  // namespace qstar
