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
#include "qstar/simulator.h"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace qstar {

namespace {

Port opposite(Port p) {
  switch (p) {
    case Port::kEast: return Port::kWest;
    case Port::kWest: return Port::kEast;
    case Port::kNorth: return Port::kSouth;
    case Port::kSouth: return Port::kNorth;
    case Port::kLocal: return Port::kLocal;
  }
  return Port::kLocal;
}

}  // namespace

void SimConfig::validate() const {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(fmt::format("injection rate {} outside [0, 1]", rate));
  }
  if (packet_flits < 1) throw Error("packet size must be at least one flit");
  if (warmup_cycles < 0 || measure_cycles < 1 || drain_cycles < 0) {
    throw Error("warmup/drain must be >= 0 and measurement >= 1 cycle");
  }
  if (vcs < 2) throw Error("at least two virtual channels are required");
  if (buffer_per_port < vcs || buffer_per_port % vcs != 0) {
    throw Error(fmt::format("buffer of {} flits cannot be split over {} VCs",
                            buffer_per_port, vcs));
  }
  if (hop_latency < 2) throw Error("hop latency must be at least 2 cycles");
  if (stall_window < 1 || sample_window < 1) {
    throw Error("stall and sample windows must be positive");
  }
}

Simulator::Simulator(const Topology& topo, const SimConfig& config,
                     const RouteBitmaps* bitmaps)
    : topo_(topo),
      config_(config),
      bitmaps_(bitmaps),
      vc_depth_(config.buffer_per_port / std::max(config.vcs, 1)),
      rng_(config.seed),
      reorder_(topo.num_nodes()) {
  config_.validate();
  if (config_.algorithm == Algorithm::kBiDOR &&
      (bitmaps_ == nullptr || bitmaps_->size() != topo.num_nodes())) {
    throw Error("BiDOR needs route bitmaps sized for the topology");
  }
  const int n = topo.num_nodes();
  const int slots = kNumPorts * config_.vcs;
  routers_.resize(n);
  for (NodeId node = 0; node < n; ++node) {
    Router& r = routers_[node];
    r.in.reserve(slots);
    for (int i = 0; i < slots; ++i) r.in.push_back({FlitQueue(vc_depth_)});
    r.credits.assign(slots, 0);
    for (int p = 0; p < kNumMeshPorts; ++p) {
      if (!topo.channel_at(node, static_cast<Port>(p))) continue;
      for (int v = 0; v < config_.vcs; ++v) {
        r.credits[slot(static_cast<Port>(p), v)] = vc_depth_;
      }
    }
    r.owner.assign(slots, -1);
    r.vc_rr.assign(kNumPorts, 0);
    r.port_rr.assign(kNumPorts, 0);
  }
  links_.resize(topo.num_channels());
  credit_links_.resize(topo.num_channels());
  sources_.resize(n);
  flow_seq_.assign(static_cast<std::size_t>(n) * n, 0);
  eject_packet_.assign(static_cast<std::size_t>(n) * config_.vcs, -1);
  eject_next_.assign(static_cast<std::size_t>(n) * config_.vcs, 0);
  forwarded_.assign(n, 0);
}

std::int64_t Simulator::enqueue(NodeId src, NodeId dst, int flits,
                                bool measured) {
  if (!topo_.valid(src) || !topo_.valid(dst) || src == dst) {
    throw Error(fmt::format("invalid packet {} -> {}", src, dst));
  }
  if (flits < 1) throw Error("packet needs at least one flit");
  PacketState ps;
  ps.rec.id = static_cast<std::int64_t>(packets_.size());
  ps.rec.src = src;
  ps.rec.dst = dst;
  ps.rec.seq = flow_seq_[static_cast<std::size_t>(src) * topo_.num_nodes() + dst]++;
  ps.rec.flits = flits;
  ps.rec.created = cycle_;
  ps.route = plan_route(config_.algorithm, topo_, src, dst, bitmaps_, rng_);
  ps.pinned_vc = pinned_vc(src, dst, ps.route);
  ps.measured = measured;
  if (measured) ++measured_outstanding_;
  if (window_open_) window_generated_ += flits;
  packets_.push_back(ps);
  sources_[src].packets.push_back(static_cast<std::int32_t>(ps.rec.id));
  return ps.rec.id;
}

std::int64_t Simulator::queued_packets() const {
  std::int64_t total = 0;
  for (const auto& q : sources_) total += static_cast<std::int64_t>(q.packets.size());
  return total;
}

bool Simulator::stalled() const {
  return flits_in_network() > 0 && cycle_ - last_move_ >= config_.stall_window;
}

void Simulator::open_window() {
  window_open_ = true;
  window_ejected_ = 0;
  window_generated_ = 0;
}

// Keeping a flow in one FIFO lane end to end preserves packet order.
int Simulator::pinned_vc(NodeId src, NodeId dst,
                         const RouteState& route) const {
  const int spread = src + dst;
  switch (config_.algorithm) {
    case Algorithm::kXY:
    case Algorithm::kYX:
      return spread % config_.vcs;
    case Algorithm::kBiDOR: {
      const int cls = static_cast<int>(route.order);
      const int lanes = (config_.vcs - cls + 1) / 2;
      return cls + 2 * (spread % lanes);
    }
    default:
      return -1;
  }
}

CreditView Simulator::free_credits(const Router& r) const {
  CreditView view{};
  for (int p = 0; p < kNumMeshPorts; ++p) {
    for (int v = 0; v < config_.vcs; ++v) {
      view[p] += r.credits[slot(static_cast<Port>(p), v)];
    }
  }
  return view;
}

void Simulator::deliver_links() {
  for (ChannelId id = 0; id < topo_.num_channels(); ++id) {
    const Channel& ch = topo_.channel(id);
    auto& link = links_[id];
    if (!link.empty() && link.front().ready <= cycle_) {
      const Port in_port = opposite(topo_.port_toward(ch.src, ch.dst));
      Router& down = routers_[ch.dst];
      while (!link.empty() && link.front().ready <= cycle_) {
        FlitQueue& buf = down.in[slot(in_port, link.front().vc)].buf;
        if (buf.full()) {
          // Credit accounting makes this unreachable; keep the flit.
          if (violation_.empty()) {
            violation_ = fmt::format("buffer overflow at node {}", ch.dst);
          }
          break;
        }
        buf.push(link.front().flit);
        link.pop_front();
      }
    }
    auto& credits = credit_links_[id];
    if (!credits.empty() && credits.front().ready <= cycle_) {
      Router& up = routers_[ch.src];
      const Port out_port = topo_.port_toward(ch.src, ch.dst);
      while (!credits.empty() && credits.front().ready <= cycle_) {
        ++up.credits[slot(out_port, credits.front().vc)];
        credits.pop_front();
      }
    }
  }
}

void Simulator::inject() {
  for (NodeId node = 0; node < topo_.num_nodes(); ++node) {
    SourceQueue& q = sources_[node];
    if (q.packets.empty()) continue;
    Router& r = routers_[node];
    const PacketState& ps = packets_[q.packets.front()];
    if (q.next_flit == 0 && ps.pinned_vc >= 0) {
      q.vc = ps.pinned_vc;
    } else if (q.next_flit == 0) {
      // Head flit: pick the local VC with the most room.
      int best = -1;
      int best_free = 0;
      for (int v = 0; v < config_.vcs; ++v) {
        const FlitQueue& buf = r.in[slot(Port::kLocal, v)].buf;
        const int free = buf.capacity() - buf.size();
        if (free > best_free) {
          best = v;
          best_free = free;
        }
      }
      if (best < 0) continue;
      q.vc = best;
    }
    FlitQueue& buf = r.in[slot(Port::kLocal, q.vc)].buf;
    if (buf.full()) continue;
    Flit f;
    f.packet = static_cast<std::int32_t>(ps.rec.id);
    f.index = static_cast<std::int16_t>(q.next_flit);
    f.head = q.next_flit == 0;
    f.tail = q.next_flit == ps.rec.flits - 1;
    buf.push(f);
    ++flits_injected_;
    last_move_ = cycle_;
    if (f.tail) {
      q.packets.pop_front();
      q.next_flit = 0;
      q.vc = -1;
    } else {
      ++q.next_flit;
    }
  }
}

void Simulator::allocate_vcs(NodeId node) {
  Router& r = routers_[node];
  const CreditView credits = free_credits(r);
  const int total = static_cast<int>(r.in.size());
  for (int i = 0; i < total; ++i) {
    const int s = (r.va_rr + i) % total;
    InputVc& iv = r.in[s];
    if (iv.allocated || iv.buf.empty()) continue;
    const Flit& f = iv.buf.front();
    PacketState& ps = packets_[f.packet];
    const RouteDecision dec =
        route_next(config_.algorithm, topo_, node, ps.rec.src, ps.rec.dst,
                   ps.route, credits);
    int chosen = -1;
    int chosen_credits = -1;
    for (int v = 0; v < config_.vcs; ++v) {
      if (r.owner[slot(dec.port, v)] != -1) continue;
      if (dec.port == Port::kLocal) {
        chosen = v;
        break;
      }
      if (!vc_in_class(v, dec.vc_class)) continue;
      if (ps.pinned_vc >= 0 && v != ps.pinned_vc) continue;
      const int c = r.credits[slot(dec.port, v)];
      if (c > chosen_credits) {
        chosen = v;
        chosen_credits = c;
      }
    }
    if (chosen < 0) continue;
    r.owner[slot(dec.port, chosen)] = f.packet;
    iv.allocated = true;
    iv.out_port = dec.port;
    iv.out_vc = chosen;
  }
  r.va_rr = (r.va_rr + 1) % total;
}

void Simulator::allocate_switch(NodeId node) {
  Router& r = routers_[node];
  const int vcs = config_.vcs;
  std::array<int, kNumPorts> request{};
  request.fill(-1);
  for (int p = 0; p < kNumPorts; ++p) {
    for (int k = 0; k < vcs; ++k) {
      const int v = (r.vc_rr[p] + k) % vcs;
      const InputVc& iv = r.in[slot(static_cast<Port>(p), v)];
      if (!iv.allocated || iv.buf.empty()) continue;
      if (iv.out_port != Port::kLocal &&
          r.credits[slot(iv.out_port, iv.out_vc)] <= 0) {
        continue;
      }
      request[p] = v;
      break;
    }
  }
  for (int o = 0; o < kNumPorts; ++o) {
    for (int k = 0; k < kNumPorts; ++k) {
      const int p = (r.port_rr[o] + k) % kNumPorts;
      if (request[p] < 0) continue;
      const InputVc& iv = r.in[slot(static_cast<Port>(p), request[p])];
      if (static_cast<int>(iv.out_port) != o) continue;
      traverse(node, static_cast<Port>(p), request[p]);
      r.vc_rr[p] = (request[p] + 1) % vcs;
      r.port_rr[o] = (p + 1) % kNumPorts;
      break;
    }
  }
}

void Simulator::traverse(NodeId node, Port in_port, int in_vc) {
  Router& r = routers_[node];
  InputVc& iv = r.in[slot(in_port, in_vc)];
  const Flit f = iv.buf.front();
  iv.buf.pop();
  ++forwarded_[node];
  last_move_ = cycle_;
  if (in_port != Port::kLocal) {
    const NodeId up = *topo_.neighbor(node, in_port);
    const ChannelId feed = *topo_.channel_at(up, opposite(in_port));
    credit_links_[feed].push_back({cycle_ + 1, in_vc});
  }
  const Port out_port = iv.out_port;
  const int out_vc = iv.out_vc;
  if (out_port == Port::kLocal) {
    on_eject(node, out_vc, f);
  } else {
    const ChannelId id = *topo_.channel_at(node, out_port);
    --r.credits[slot(out_port, out_vc)];
    links_[id].push_back({cycle_ + config_.hop_latency, out_vc, f});
  }
  if (f.tail) {
    r.owner[slot(out_port, out_vc)] = -1;
    iv.allocated = false;
  }
}

void Simulator::on_eject(NodeId node, int vc, const Flit& flit) {
  ++flits_ejected_;
  if (window_open_) ++window_ejected_;
  const std::size_t key = static_cast<std::size_t>(node) * config_.vcs + vc;
  if (eject_packet_[key] == -1) {
    if (!flit.head && violation_.empty()) {
      violation_ = fmt::format(
          "node {} vc {}: packet {} ejected without its head", node, vc,
          flit.packet);
    }
    eject_packet_[key] = flit.packet;
    eject_next_[key] = 0;
  }
  if ((eject_packet_[key] != flit.packet || eject_next_[key] != flit.index) &&
      violation_.empty()) {
    violation_ = fmt::format(
        "node {} vc {}: flit {}.{} interleaved with packet {}", node, vc,
        flit.packet, flit.index, eject_packet_[key]);
  }
  ++eject_next_[key];
  if (flit.tail) eject_packet_[key] = -1;

  PacketState& ps = packets_[flit.packet];
  reorder_.on_eject(ps.rec.src, ps.rec.dst, ps.rec.seq, ps.rec.flits);
  if (flit.tail) {
    ps.rec.ejected = cycle_ + 1;
    if (ps.measured) {
      latencies_.push_back(static_cast<double>(ps.rec.ejected - ps.rec.created));
      --measured_outstanding_;
    }
  }
}

void Simulator::step() {
  deliver_links();
  inject();
  for (NodeId node = 0; node < topo_.num_nodes(); ++node) allocate_vcs(node);
  for (NodeId node = 0; node < topo_.num_nodes(); ++node) allocate_switch(node);
  ++cycle_;
}

std::optional<std::string> Simulator::check_invariants() const {
  if (!violation_.empty()) return violation_;
  std::int64_t buffered = 0;
  for (NodeId node = 0; node < topo_.num_nodes(); ++node) {
    const Router& r = routers_[node];
    for (std::size_t s = 0; s < r.in.size(); ++s) {
      const FlitQueue& buf = r.in[s].buf;
      buffered += buf.size();
      if (buf.size() > vc_depth_) {
        return fmt::format("node {} slot {} holds {} flits", node, s, buf.size());
      }
      for (int i = 0; i + 1 < buf.size(); ++i) {
        const Flit& a = buf.at(i);
        const Flit& b = buf.at(i + 1);
        const bool ok = a.tail ? b.head
                               : (b.packet == a.packet && b.index == a.index + 1);
        if (!ok) {
          return fmt::format("node {} slot {}: packet {} is not contiguous",
                             node, s, a.packet);
        }
      }
    }
  }
  std::int64_t on_links = 0;
  for (const auto& link : links_) on_links += static_cast<std::int64_t>(link.size());
  if (buffered + on_links != flits_in_network()) {
    return fmt::format("flit conservation: {} injected, {} ejected, {} in flight",
                       flits_injected_, flits_ejected_, buffered + on_links);
  }
  for (ChannelId id = 0; id < topo_.num_channels(); ++id) {
    const Channel& ch = topo_.channel(id);
    const Port out_port = topo_.port_toward(ch.src, ch.dst);
    const Port in_port = opposite(out_port);
    for (int v = 0; v < config_.vcs; ++v) {
      const int credits = routers_[ch.src].credits[slot(out_port, v)];
      if (credits < 0) {
        return fmt::format("channel {}->{} vc {}: negative credits", ch.src,
                           ch.dst, v);
      }
      const auto flying = std::count_if(
          links_[id].begin(), links_[id].end(),
          [v](const LinkFlit& lf) { return lf.vc == v; });
      const auto returning = std::count_if(
          credit_links_[id].begin(), credit_links_[id].end(),
          [v](const LinkCredit& lc) { return lc.vc == v; });
      const int held = routers_[ch.dst].in[slot(in_port, v)].buf.size();
      if (credits + flying + returning + held != vc_depth_) {
        return fmt::format(
            "channel {}->{} vc {}: credits {} + in flight {} + returning {} + "
            "buffered {} != {}",
            ch.src, ch.dst, v, credits, flying, returning, held, vc_depth_);
      }
    }
  }
  return std::nullopt;
}

namespace {

// Shared driver state for run() and replay().
struct Sampler {
  std::int64_t window;
  std::vector<std::int64_t> last_forwarded;

  void maybe_sample(Simulator& sim, SimResults& res) {
    if (sim.cycle() % window != 0) return;
    flush(sim, res, sim.cycle() - window);
  }
  void flush(Simulator& sim, SimResults& res, std::int64_t start) {
    const auto& fwd = sim.forwarded();
    std::vector<std::int64_t> diff(fwd.size());
    for (std::size_t i = 0; i < fwd.size(); ++i) diff[i] = fwd[i] - last_forwarded[i];
    last_forwarded = fwd;
    res.window_forwarded.push_back(std::move(diff));
    res.reorder_series.emplace_back(start,
                                    sim.take_reorder_window_peak());
  }
};

void finish(Simulator& sim, SimResults& res, const SimConfig& config) {
  res.latencies = sim.latencies();
  res.flits_injected = sim.flits_injected();
  res.flits_ejected = sim.flits_ejected();
  res.packets_created = sim.num_packets();
  res.unfinished = sim.measured_outstanding();
  res.reorder_peak = sim.reorder().peak();
  res.cycles = sim.cycle();
  if (config.record_packets) {
    res.packets.reserve(sim.num_packets());
    for (std::int64_t i = 0; i < sim.num_packets(); ++i) {
      res.packets.push_back(sim.packet(i));
    }
  }
}

bool check(Simulator& sim, SimResults& res, const SimConfig& config) {
  if (!config.check_invariants || !res.invariant_violation.empty()) return true;
  if (auto violation = sim.check_invariants()) {
    res.invariant_violation =
        fmt::format("cycle {}: {}", sim.cycle(), *violation);
    return false;
  }
  return true;
}

}  // namespace

SimResults run(const Topology& topo, const SimConfig& config,
               const TrafficMatrix& matrix, const RouteBitmaps* bitmaps) {
  config.validate();
  if (matrix.size() != topo.num_nodes()) {
    throw Error("traffic matrix does not match the topology");
  }
  Simulator sim(topo, config, bitmaps);
  const BernoulliSource source(matrix, config.rate, config.packet_flits);
  SimResults res;
  res.active_sources = source.active_sources();
  Sampler sampler{config.sample_window,
                  std::vector<std::int64_t>(topo.num_nodes(), 0)};

  const std::int64_t measure_start = config.warmup_cycles;
  const std::int64_t measure_end = measure_start + config.measure_cycles;
  const std::int64_t hard_end = measure_end + config.drain_cycles;
  std::vector<std::int64_t> forwarded_at_start(topo.num_nodes(), 0);
  bool window_closed = false;
  auto close_window = [&] {
    window_closed = true;
    sim.close_window();
    const std::int64_t cycles = sim.cycle() - measure_start;
    res.measure_cycles = cycles;
    res.node_forwarded.resize(topo.num_nodes());
    for (NodeId n = 0; n < topo.num_nodes(); ++n) {
      res.node_forwarded[n] = sim.forwarded()[n] - forwarded_at_start[n];
    }
    const double denom =
        static_cast<double>(std::max(res.active_sources, 1)) *
        static_cast<double>(std::max<std::int64_t>(cycles, 1));
    res.offered = static_cast<double>(sim.generated_in_window()) / denom;
    res.accepted = static_cast<double>(sim.ejected_in_window()) / denom;
  };

  std::vector<PacketRequest> batch;
  while (true) {
    const std::int64_t now = sim.cycle();
    if (now == measure_start) {
      sim.open_window();
      forwarded_at_start = sim.forwarded();
    }
    if (now == measure_end) close_window();
    if (now >= measure_end && sim.measured_outstanding() == 0) break;
    if (now >= hard_end) break;
    batch.clear();
    source.generate(sim.rng(), batch);
    const bool measured = now >= measure_start && now < measure_end;
    for (const auto& req : batch) sim.enqueue(req.src, req.dst, req.flits, measured);
    sim.step();
    check(sim, res, config);
    sampler.maybe_sample(sim, res);
    if (sim.stalled()) {
      res.deadlock = true;
      break;
    }
  }
  if (!window_closed) {
    if (sim.cycle() <= measure_start) {
      sim.open_window();
      forwarded_at_start = sim.forwarded();
    }
    close_window();
  }
  finish(sim, res, config);
  return res;
}

SimResults replay(const Topology& topo, const SimConfig& config,
                  const Trace& trace, const RouteBitmaps* bitmaps) {
  config.validate();
  Simulator sim(topo, config, bitmaps);
  SimResults res;
  std::vector<bool> sources(topo.num_nodes(), false);
  for (const auto& e : trace.events()) sources[e.src] = true;
  res.active_sources =
      static_cast<int>(std::count(sources.begin(), sources.end(), true));
  Sampler sampler{config.sample_window,
                  std::vector<std::int64_t>(topo.num_nodes(), 0)};

  const auto& events = trace.events();
  std::size_t next = 0;
  sim.open_window();
  while (true) {
    const std::int64_t now = sim.cycle();
    while (next < events.size() && events[next].cycle <= now) {
      const auto& e = events[next++];
      sim.enqueue(e.src, e.dst, e.flits, true);
    }
    if (next == events.size() && sim.measured_outstanding() == 0) break;
    sim.step();
    check(sim, res, config);
    sampler.maybe_sample(sim, res);
    if (sim.stalled()) {
      res.deadlock = true;
      break;
    }
  }
  if (sim.cycle() % config.sample_window != 0) {
    sampler.flush(sim, res, sim.cycle() - sim.cycle() % config.sample_window);
  }
  sim.close_window();
  res.measure_cycles = sim.cycle();
  res.node_forwarded = sim.forwarded();
  const double denom = static_cast<double>(std::max(res.active_sources, 1)) *
                       static_cast<double>(std::max<std::int64_t>(sim.cycle(), 1));
  res.offered = static_cast<double>(sim.generated_in_window()) / denom;
  res.accepted = static_cast<double>(sim.ejected_in_window()) / denom;
  finish(sim, res, config);
  return res;
}

}  // namespace qstar
