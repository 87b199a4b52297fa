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
#ifndef QSTAR_SIMULATOR_H_
#define QSTAR_SIMULATOR_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qstar/bidor.h"
#include "qstar/metrics.h"
#include "qstar/routing.h"
#include "qstar/topology.h"
#include "qstar/traffic.h"

namespace qstar {

struct SimConfig {
  Algorithm algorithm = Algorithm::kXY;
  double rate = 0.1;  // offered flits per active source per cycle
  int packet_flits = 4;
  std::int64_t warmup_cycles = 10000;
  std::int64_t measure_cycles = 20000;
  // Extra cycles allowed for measured packets to drain.
  std::int64_t drain_cycles = 20000;
  std::uint64_t seed = 1;
  // Input buffering per port, split evenly across the VCs.
  int buffer_per_port = 64;
  int vcs = 2;
  // Cycles from switch allocation at one router to eligibility at the next:
  // one for the router stage plus link traversal.
  int hop_latency = 2;
  std::int64_t stall_window = 10000;
  std::int64_t sample_window = 1000;
  bool check_invariants = false;
  bool record_packets = false;

  // Throws Error describing the first invalid field.
  void validate() const;
};

struct PacketRecord {
  std::int64_t id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::int64_t seq = 0;
  int flits = 0;
  std::int64_t created = 0;
  std::int64_t ejected = -1;  // cycle the tail flit left the network
};

struct SimResults {
  // Creation-to-tail-ejection latency of every measured packet, in cycles.
  std::vector<double> latencies;
  std::vector<PacketRecord> packets;  // only with record_packets
  // Flits switched by each router during the measurement window.
  std::vector<std::int64_t> node_forwarded;
  std::int64_t measure_cycles = 0;
  int active_sources = 0;
  double offered = 0.0;   // generated flits/source/cycle in the window
  double accepted = 0.0;  // ejected flits/source/cycle in the window
  std::int64_t packets_created = 0;
  std::int64_t flits_injected = 0;  // entered router buffers
  std::int64_t flits_ejected = 0;
  std::int64_t unfinished = 0;      // measured packets still undelivered
  int reorder_peak = 0;
  // (window start cycle, peak reorder occupancy inside the window)
  std::vector<std::pair<std::int64_t, int>> reorder_series;
  // Per sample window, flits switched by each router.
  std::vector<std::vector<std::int64_t>> window_forwarded;
  std::int64_t cycles = 0;
  bool deadlock = false;
  // First invariant violation seen with check_invariants; empty if none.
  std::string invariant_violation;
};

// Cycle-driven flit-level model of input-queued wormhole routers with
// virtual channels and credit-based flow control. Single-threaded and
// deterministic for a given seed.
class Simulator {
 public:
  Simulator(const Topology& topo, const SimConfig& config,
            const RouteBitmaps* bitmaps = nullptr);

  // Queues a packet at its source's unbounded injection queue in the current
  // cycle. `measured` packets contribute latency samples.
  std::int64_t enqueue(NodeId src, NodeId dst, int flits, bool measured);

  // Advances one cycle: link and credit arrivals, injection into router
  // buffers, route computation and VC allocation, switch allocation and
  // traversal.
  void step();

  std::int64_t cycle() const { return cycle_; }
  std::int64_t flits_in_network() const {
    return flits_injected_ - flits_ejected_;
  }
  std::int64_t flits_injected() const { return flits_injected_; }
  std::int64_t flits_ejected() const { return flits_ejected_; }
  std::int64_t queued_packets() const;
  std::int64_t last_movement() const { return last_move_; }
  bool stalled() const;
  const PacketRecord& packet(std::int64_t id) const { return packets_[id].rec; }
  std::int64_t num_packets() const {
    return static_cast<std::int64_t>(packets_.size());
  }
  const ReorderTracker& reorder() const { return reorder_; }
  int take_reorder_window_peak() { return reorder_.take_window_peak(); }
  std::mt19937_64& rng() { return rng_; }

  // Flit conservation, credit soundness and wormhole contiguity. Returns a
  // description of the first violation.
  std::optional<std::string> check_invariants() const;

  // Flits switched by each router since the start of the run.
  const std::vector<std::int64_t>& forwarded() const { return forwarded_; }
  std::int64_t measured_outstanding() const { return measured_outstanding_; }
  const std::vector<double>& latencies() const { return latencies_; }
  std::int64_t ejected_in_window() const { return window_ejected_; }
  std::int64_t generated_in_window() const { return window_generated_; }
  // Counts generated and ejected flits between open and close.
  void open_window();
  void close_window() { window_open_ = false; }

 private:
  struct Flit {
    std::int32_t packet = -1;
    std::int16_t index = 0;
    bool head = false;
    bool tail = false;
  };

  // Fixed-capacity FIFO.
  class FlitQueue {
   public:
    explicit FlitQueue(int capacity = 0) : slots_(capacity) {}
    bool empty() const { return size_ == 0; }
    bool full() const { return size_ == static_cast<int>(slots_.size()); }
    int size() const { return size_; }
    int capacity() const { return static_cast<int>(slots_.size()); }
    const Flit& front() const { return slots_[head_]; }
    const Flit& at(int i) const {
      return slots_[(head_ + i) % slots_.size()];
    }
    void push(const Flit& f) {
      slots_[(head_ + size_) % slots_.size()] = f;
      ++size_;
    }
    void pop() {
      head_ = (head_ + 1) % static_cast<int>(slots_.size());
      --size_;
    }

   private:
    std::vector<Flit> slots_;
    int head_ = 0;
    int size_ = 0;
  };

  struct InputVc {
    FlitQueue buf;
    bool allocated = false;  // holds an output VC for the current packet
    Port out_port = Port::kLocal;
    int out_vc = 0;
  };

  struct Router {
    std::vector<InputVc> in;           // [port * vcs + vc]
    std::vector<int> credits;          // [mesh port * vcs + vc]
    std::vector<std::int32_t> owner;   // [port * vcs + vc], -1 when free
    std::vector<int> vc_rr;            // per input port
    std::vector<int> port_rr;          // per output port
    int va_rr = 0;
  };

  struct LinkFlit {
    std::int64_t ready;
    int vc;
    Flit flit;
  };
  struct LinkCredit {
    std::int64_t ready;
    int vc;
  };

  struct PacketState {
    PacketRecord rec;
    RouteState route;
    // Fixed VC for every hop of single-path algorithms, -1 otherwise.
    int pinned_vc = -1;
    bool measured = false;
  };

  struct SourceQueue {
    std::deque<std::int32_t> packets;
    int next_flit = 0;  // next flit index of the front packet
    int vc = -1;        // VC the front packet is being written into
  };

  int slot(Port port, int vc) const {
    return static_cast<int>(port) * config_.vcs + vc;
  }
  bool vc_in_class(int vc, std::uint8_t vc_class) const {
    return vc_class == kAnyVcClass || vc % 2 == vc_class;
  }
  int pinned_vc(NodeId src, NodeId dst, const RouteState& route) const;
  CreditView free_credits(const Router& r) const;
  void deliver_links();
  void inject();
  void allocate_vcs(NodeId node);
  void allocate_switch(NodeId node);
  void traverse(NodeId node, Port in_port, int in_vc);
  void on_eject(NodeId node, int vc, const Flit& flit);

  const Topology& topo_;
  SimConfig config_;
  const RouteBitmaps* bitmaps_;
  int vc_depth_;
  std::mt19937_64 rng_;
  std::int64_t cycle_ = 0;

  std::vector<Router> routers_;
  std::vector<std::deque<LinkFlit>> links_;      // per channel
  std::vector<std::deque<LinkCredit>> credit_links_;  // per channel, upstream
  std::vector<SourceQueue> sources_;
  std::vector<PacketState> packets_;
  std::vector<std::int64_t> flow_seq_;
  // Ejection contiguity bookkeeping per [node * vcs + vc].
  std::vector<std::int32_t> eject_packet_;
  std::vector<int> eject_next_;
  std::string violation_;

  ReorderTracker reorder_;
  std::vector<std::int64_t> forwarded_;
  std::vector<double> latencies_;
  std::int64_t flits_injected_ = 0;
  std::int64_t flits_ejected_ = 0;
  std::int64_t last_move_ = 0;
  std::int64_t measured_outstanding_ = 0;
  std::int64_t window_ejected_ = 0;
  std::int64_t window_generated_ = 0;
  bool window_open_ = false;
};

// Synthetic run: warmup, measurement window, then drain until every measured
// packet is delivered or drain_cycles expire. Packets are generated by a
// BernoulliSource over `matrix`.
SimResults run(const Topology& topo, const SimConfig& config,
               const TrafficMatrix& matrix,
               const RouteBitmaps* bitmaps = nullptr);

// Trace replay: every trace event becomes a packet at its cycle; runs until
// all are delivered (or the network stalls). All packets are measured.
SimResults replay(const Topology& topo, const SimConfig& config,
                  const Trace& trace, const RouteBitmaps* bitmaps = nullptr);

}  // namespace qstar

#endif  // QSTAR_SIMULATOR_H_
