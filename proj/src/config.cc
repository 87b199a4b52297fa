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
#include "qstar/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include <fmt/format.h>

#include "qstar/topology.h"

namespace qstar {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(fmt::format("{}: '{}' is not a number", what, text));
  }
  return v;
}

}  // namespace

const std::map<std::string, std::string, std::less<>>& Config::defaults() {
  static const std::map<std::string, std::string, std::less<>> kDefaults = {
      {"topology.width", "5"},
      {"topology.height", "5"},
      {"topology.io_mode", "edge_only"},
      {"traffic.pattern", "uniform"},
      {"traffic.matrix", ""},
      {"traffic.trace", ""},
      {"traffic.seed", "1"},
      {"sim.algorithm", "xy"},
      {"sim.rate", "0.1"},
      {"sim.packet_flits", "4"},
      {"sim.warmup", "10000"},
      {"sim.measure", "20000"},
      {"sim.drain", "20000"},
      {"sim.seed", "1"},
      {"sim.buffer_per_port", "64"},
      {"sim.vcs", "2"},
      {"sim.hop_latency", "2"},
      {"sim.stall_window", "10000"},
      {"sim.sample_window", "1000"},
      {"sim.check_invariants", "false"},
      {"nrank.w_th", "0.01"},
      {"nrank.iter_th", "100"},
      {"bidor.bitmaps", ""},
      {"sweep.algorithms", "xy,o1turn,valiant,romm,oddeven,bidor"},
      {"sweep.patterns", "uniform"},
      {"sweep.rates", "0.02:0.40:0.02"},
      {"sweep.seeds", "1"},
      {"sweep.jobs", "1"},
      {"metrics.latency_cap_factor", "10"},
      {"metrics.accept_fraction", "0.99"},
  };
  return kDefaults;
}

Config::Config() : values_(defaults()) {}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  parse(in, path.string());
}

void Config::parse(std::istream& in, std::string_view origin) {
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find_first_of("#;"); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw Error(fmt::format("{}:{}: malformed section header", origin, line_no));
      }
      section = std::string(trim(text.substr(1, text.size() - 2)));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw Error(fmt::format("{}:{}: expected key = value", origin, line_no));
    }
    std::string key(trim(text.substr(0, eq)));
    if (key.find('.') == std::string::npos && !section.empty()) {
      key = section + "." + key;
    }
    try {
      set(key, trim(text.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(fmt::format("{}:{}: {}", origin, line_no, e.what()));
    }
  }
}

void Config::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error(fmt::format("--set expects key=value, got '{}'", assignment));
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(std::string_view key, std::string_view value) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw Error(fmt::format("unknown configuration key '{}'", key));
  }
  it->second = std::string(value);
}

const std::string& Config::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw Error(fmt::format("unknown configuration key '{}'", key));
  }
  return it->second;
}

double Config::get_double(std::string_view key) const {
  return to_double(get(key), key);
}

std::int64_t Config::get_int(std::string_view key) const {
  const std::string& text = get(key);
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(fmt::format("{}: '{}' is not an integer", key, text));
  }
  return v;
}

bool Config::get_bool(std::string_view key) const {
  const std::string& text = get(key);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error(fmt::format("{}: '{}' is not a boolean", key, text));
}

std::vector<std::string> Config::get_list(std::string_view key) const {
  std::vector<std::string> out;
  for (auto item : split(get(key), ',')) {
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

std::vector<double> parse_rates(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
      throw Error(fmt::format("rate range '{}' must be lo:hi:step", text));
    }
    const double lo = to_double(parts[0], "rate");
    const double hi = to_double(parts[1], "rate");
    const double step = to_double(parts[2], "rate");
    if (!(step > 0.0) || hi < lo) {
      throw Error(fmt::format("rate range '{}' is empty", text));
    }
    const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) {
      out.push_back(std::round((lo + i * step) * 1e9) / 1e9);
    }
  } else {
    for (auto item : split(text, ',')) {
      if (!item.empty()) out.push_back(to_double(item, "rate"));
    }
  }
  if (out.empty()) throw Error("no injection rates given");
  for (double r : out) {
    if (!(r > 0.0 && r <= 1.0)) {
      throw Error(fmt::format("injection rate {} outside (0, 1]", r));
    }
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (auto item : split(text, ',')) {
    if (item.empty()) continue;
    std::uint64_t v = 0;
    const auto* end = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(item.data(), end, v);
    if (ec != std::errc() || ptr != end) {
      throw Error(fmt::format("seed '{}' is not a non-negative integer", item));
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error("no seeds given");
  return out;
}

}  // namespace qstar
