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
#ifndef QSTAR_TOPOLOGY_H_
#define QSTAR_TOPOLOGY_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qstar {

// Raised for invalid inputs: bad topology parameters, malformed files,
// inconsistent configuration.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-major node index: id = y * width + x.
using NodeId = std::int32_t;
using ChannelId = std::int32_t;

struct Coord {
  int x;
  int y;
  friend bool operator==(const Coord&, const Coord&) = default;
};

// Router ports. North increases y, East increases x.
enum class Port : std::uint8_t { kEast = 0, kWest, kNorth, kSouth, kLocal };
inline constexpr int kNumMeshPorts = 4;
inline constexpr int kNumPorts = 5;

std::string_view to_string(Port port);

enum class DorOrder : std::uint8_t { kXY = 0, kYX = 1 };
std::string_view to_string(DorOrder order);

enum class IoMode : std::uint8_t { kAllNodes, kEdgeOnly };
IoMode parse_io_mode(std::string_view text);
std::string_view to_string(IoMode mode);

struct Channel {
  NodeId src;
  NodeId dst;
  friend bool operator==(const Channel&, const Channel&) = default;
};

// A width x height 2D mesh with bidirectional channels between every pair of
// adjacent nodes. Immutable after construction.
class Topology {
 public:
  Topology(int width, int height, IoMode io_mode);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_nodes() const { return width_ * height_; }
  IoMode io_mode() const { return io_mode_; }

  Coord coord(NodeId node) const { return {node % width_, node / width_}; }
  NodeId node_at(Coord c) const { return c.y * width_ + c.x; }
  bool contains(Coord c) const {
    return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
  }
  bool valid(NodeId node) const { return node >= 0 && node < num_nodes(); }
  int manhattan(NodeId a, NodeId b) const;

  const std::vector<Channel>& channels() const { return channels_; }
  int num_channels() const { return static_cast<int>(channels_.size()); }
  const Channel& channel(ChannelId id) const { return channels_[id]; }
  // Channel leaving `node` through `port`, if the neighbour exists.
  std::optional<ChannelId> channel_at(NodeId node, Port port) const;
  std::optional<ChannelId> find_channel(NodeId src, NodeId dst) const;
  // Neighbour across `port`, if any.
  std::optional<NodeId> neighbor(NodeId node, Port port) const;
  // Port of `from` that leads to the adjacent node `to`.
  Port port_toward(NodeId from, NodeId to) const;

  // U^n: nodes with a channel into n. D^n: nodes reachable by one channel.
  std::span<const NodeId> upstream(NodeId node) const { return upstream_[node]; }
  std::span<const NodeId> downstream(NodeId node) const {
    return downstream_[node];
  }
  std::span<const ChannelId> in_channels(NodeId node) const {
    return in_channels_[node];
  }
  std::span<const ChannelId> out_channels(NodeId node) const {
    return out_channels_[node];
  }

  bool is_io(NodeId node) const { return io_mask_[node]; }
  const std::vector<NodeId>& io_nodes() const { return io_nodes_; }
  int num_io_nodes() const { return static_cast<int>(io_nodes_.size()); }

  // True when `c` can be used by a minimal (detour-free) route from s to d:
  // both endpoints lie in the rectangle spanned by s and d, and traversing c
  // strictly reduces the distance to d.
  bool min_rect_contains(NodeId s, NodeId d, const Channel& c) const;

  // Full dimension-order node sequence from s to d, both ends included.
  std::vector<NodeId> dor_path(NodeId s, NodeId d, DorOrder order) const;

 private:
  int width_;
  int height_;
  IoMode io_mode_;
  std::vector<Channel> channels_;
  std::vector<std::array<ChannelId, kNumMeshPorts>> port_channel_;
  std::vector<std::vector<NodeId>> upstream_;
  std::vector<std::vector<NodeId>> downstream_;
  std::vector<std::vector<ChannelId>> in_channels_;
  std::vector<std::vector<ChannelId>> out_channels_;
  std::vector<bool> io_mask_;
  std::vector<NodeId> io_nodes_;
};

Topology build_mesh(int width, int height, IoMode io_mode);

}  // namespace qstar

#endif  // QSTAR_TOPOLOGY_H_
