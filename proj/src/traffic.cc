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
#include "qstar/traffic.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace qstar {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

TrafficMatrix::TrafficMatrix(int num_nodes)
    : n_(num_nodes),
      v_(static_cast<std::size_t>(num_nodes) * num_nodes, 0.0) {}

double TrafficMatrix::row_sum(NodeId s) const {
  const auto r = row(s);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

double TrafficMatrix::total() const {
  return std::accumulate(v_.begin(), v_.end(), 0.0);
}

TrafficMatrix normalize(const TrafficMatrix& m) {
  TrafficMatrix out = m;
  double dropped = 0.0;
  for (NodeId s = 0; s < m.size(); ++s) {
    for (NodeId d = 0; d < m.size(); ++d) {
      if (m(s, d) < 0.0) {
        throw Error(fmt::format("negative traffic {} at ({}, {})", m(s, d), s, d));
      }
    }
    dropped += out.at(s, s);
    out.at(s, s) = 0.0;
  }
  if (dropped > 0.0) {
    std::cerr << "qstar: warning: dropping self-traffic on the matrix diagonal\n";
  }
  const double sum = out.total();
  if (!(sum > 0.0)) throw Error("traffic matrix has no positive entry");
  for (NodeId s = 0; s < m.size(); ++s) {
    for (NodeId d = 0; d < m.size(); ++d) out.at(s, d) /= sum;
  }
  return out;
}

void validate_for(const TrafficMatrix& m, const Topology& topo) {
  if (m.size() != topo.num_nodes()) {
    throw Error(fmt::format("traffic matrix is {0}x{0} but the topology has {1} nodes",
                            m.size(), topo.num_nodes()));
  }
  for (NodeId s = 0; s < m.size(); ++s) {
    for (NodeId d = 0; d < m.size(); ++d) {
      const double v = m(s, d);
      if (v < 0.0) {
        throw Error(fmt::format("negative traffic at row {}, column {}", s, d));
      }
      if (v > 0.0 && s != d && (!topo.is_io(s) || !topo.is_io(d))) {
        throw Error(fmt::format(
            "traffic at row {}, column {} involves a node without I/O", s, d));
      }
    }
  }
}

Pattern parse_pattern(std::string_view text) {
  if (text == "uniform") return Pattern::kUniform;
  if (text == "shuffle") return Pattern::kShuffle;
  if (text == "permutation") return Pattern::kPermutation;
  if (text == "overturn") return Pattern::kOverturn;
  throw Error("unknown traffic pattern '" + std::string(text) + "'");
}

std::string_view to_string(Pattern pattern) {
  switch (pattern) {
    case Pattern::kUniform: return "uniform";
    case Pattern::kShuffle: return "shuffle";
    case Pattern::kPermutation: return "permutation";
    case Pattern::kOverturn: return "overturn";
  }
  return "?";
}

TrafficMatrix generate_pattern(const Topology& topo, Pattern pattern,
                               std::uint64_t seed) {
  const auto& io = topo.io_nodes();
  const int k = static_cast<int>(io.size());
  if (k < 2) throw Error("traffic patterns need at least two I/O nodes");
  TrafficMatrix m(topo.num_nodes());
  auto add = [&](NodeId s, NodeId d) {
    if (s != d) m.at(s, d) = 1.0;
  };
  switch (pattern) {
    case Pattern::kUniform:
      for (NodeId s : io) {
        for (NodeId d : io) add(s, d);
      }
      break;
    case Pattern::kShuffle: {
      if (!std::has_single_bit(static_cast<unsigned>(k))) {
        throw Error(fmt::format(
            "shuffle needs a power-of-two number of I/O nodes, have {}", k));
      }
      const int bits = std::countr_zero(static_cast<unsigned>(k));
      const unsigned mask = static_cast<unsigned>(k) - 1;
      for (int i = 0; i < k; ++i) {
        const unsigned u = static_cast<unsigned>(i);
        const unsigned j = bits == 0 ? u : ((u << 1) | (u >> (bits - 1))) & mask;
        add(io[i], io[j]);
      }
      break;
    }
    case Pattern::kPermutation: {
      std::vector<NodeId> perm = io;
      std::mt19937_64 rng(seed);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (int i = 0; i < k; ++i) add(io[i], perm[i]);
      break;
    }
    case Pattern::kOverturn:
      for (NodeId s : io) {
        const Coord c = topo.coord(s);
        const NodeId d =
            topo.node_at({topo.width() - 1 - c.x, topo.height() - 1 - c.y});
        if (topo.is_io(d)) add(s, d);
      }
      break;
  }
  if (!(m.total() > 0.0)) {
    throw Error(fmt::format("pattern {} produces no traffic on this topology",
                            to_string(pattern)));
  }
  return normalize(m);
}

TrafficMatrix parse_matrix(std::istream& in, const Topology& topo) {
  const int n = topo.num_nodes();
  TrafficMatrix m(n);
  std::string line;
  int row = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (row >= n) {
      throw Error(fmt::format("line {}: more than {} rows", line_no, n));
    }
    const auto cells = split_csv(line);
    if (static_cast<int>(cells.size()) != n) {
      throw Error(fmt::format("row {} (line {}): expected {} columns, found {}",
                              row, line_no, n, cells.size()));
    }
    for (int col = 0; col < n; ++col) {
      double v = 0.0;
      if (!parse_number(cells[col], v)) {
        throw Error(fmt::format("row {}, column {}: cannot parse '{}'", row, col,
                                cells[col]));
      }
      if (v < 0.0) {
        throw Error(fmt::format("row {}, column {}: negative value {}", row, col,
                                cells[col]));
      }
      m.at(row, col) = v;
    }
    ++row;
  }
  if (row != n) {
    throw Error(fmt::format("expected {} rows, found {}", n, row));
  }
  validate_for(m, topo);
  return normalize(m);
}

TrafficMatrix load_matrix(const std::filesystem::path& path,
                          const Topology& topo) {
  auto in = open_input(path);
  try {
    return parse_matrix(in, topo);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_matrix(std::ostream& out, const TrafficMatrix& m) {
  for (NodeId s = 0; s < m.size(); ++s) {
    for (NodeId d = 0; d < m.size(); ++d) {
      out << (d ? "," : "") << fmt::format("{}", m(s, d));
    }
    out << '\n';
  }
}

Trace::Trace(int num_nodes, std::vector<TraceEvent> events)
    : num_nodes_(num_nodes), events_(std::move(events)) {}

TrafficMatrix Trace::matrix() const {
  TrafficMatrix m(num_nodes_);
  for (const auto& e : events_) m.at(e.src, e.dst) += e.flits;
  return normalize(m);
}

Trace parse_trace(std::istream& in, const Topology& topo) {
  std::string line;
  int line_no = 0;
  bool header = false;
  std::vector<TraceEvent> events;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (!header) {
      if (cells.size() != 4 || cells[0] != "cycle" || cells[1] != "src" ||
          cells[2] != "dst" || cells[3] != "flits") {
        throw Error(fmt::format("line {}: expected header 'cycle,src,dst,flits'",
                                line_no));
      }
      header = true;
      continue;
    }
    if (cells.size() != 4) {
      throw Error(fmt::format("line {}: expected 4 fields, found {}", line_no,
                              cells.size()));
    }
    TraceEvent e;
    if (!parse_number(cells[0], e.cycle) || e.cycle < 0) {
      throw Error(fmt::format("line {}: bad cycle '{}'", line_no, cells[0]));
    }
    if (!parse_number(cells[1], e.src) || !topo.valid(e.src)) {
      throw Error(fmt::format("line {}: bad source node '{}'", line_no, cells[1]));
    }
    if (!parse_number(cells[2], e.dst) || !topo.valid(e.dst)) {
      throw Error(fmt::format("line {}: bad destination node '{}'", line_no,
                              cells[2]));
    }
    if (!parse_number(cells[3], e.flits) || e.flits < 1) {
      throw Error(fmt::format("line {}: bad flit count '{}'", line_no, cells[3]));
    }
    if (e.src == e.dst) {
      throw Error(fmt::format("line {}: source equals destination ({})", line_no,
                              e.src));
    }
    if (!topo.is_io(e.src) || !topo.is_io(e.dst)) {
      throw Error(fmt::format("line {}: node without I/O port", line_no));
    }
    if (!events.empty() && e.cycle < events.back().cycle) {
      throw Error(fmt::format("line {}: cycle {} is earlier than the previous event",
                              line_no, e.cycle));
    }
    events.push_back(e);
  }
  if (!header) throw Error("missing header 'cycle,src,dst,flits'");
  return Trace(topo.num_nodes(), std::move(events));
}

Trace load_trace(const std::filesystem::path& path, const Topology& topo) {
  auto in = open_input(path);
  try {
    return parse_trace(in, topo);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << "cycle,src,dst,flits\n";
  for (const auto& e : trace.events()) {
    out << e.cycle << ',' << e.src << ',' << e.dst << ',' << e.flits << '\n';
  }
}

BernoulliSource::BernoulliSource(const TrafficMatrix& m, double rate,
                                 int packet_flits)
    : packet_flits_(packet_flits),
      prob_(m.size(), 0.0),
      cdf_(m.size()),
      targets_(m.size()) {
  if (packet_flits < 1) throw Error("packet size must be at least one flit");
  const double total = m.total();
  for (NodeId s = 0; s < m.size(); ++s) {
    if (m.row_sum(s) > 0.0) ++active_;
  }
  if (active_ == 0 || !(total > 0.0)) return;
  for (NodeId s = 0; s < m.size(); ++s) {
    const double row = m.row_sum(s);
    if (!(row > 0.0)) continue;
    const double share = row / total * active_;
    prob_[s] = std::min(1.0, rate * share / packet_flits);
    double acc = 0.0;
    for (NodeId d = 0; d < m.size(); ++d) {
      if (m(s, d) <= 0.0) continue;
      acc += m(s, d) / row;
      cdf_[s].push_back(acc);
      targets_[s].push_back(d);
    }
    cdf_[s].back() = 1.0;
  }
}

void BernoulliSource::generate(std::mt19937_64& rng,
                               std::vector<PacketRequest>& out) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (NodeId s = 0; s < static_cast<NodeId>(prob_.size()); ++s) {
    if (prob_[s] <= 0.0) continue;
    if (unit(rng) >= prob_[s]) continue;
    const double u = unit(rng);
    const auto it = std::upper_bound(cdf_[s].begin(), cdf_[s].end(), u);
    const auto idx = std::min<std::size_t>(it - cdf_[s].begin(),
                                           targets_[s].size() - 1);
    out.push_back({s, targets_[s][idx], packet_flits_});
  }
}

}  // namespace qstar
