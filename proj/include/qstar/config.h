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
#ifndef QSTAR_CONFIG_H_
#define QSTAR_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qstar {

// Flat `section.key = value` configuration. Keys may also be grouped under
// `[section]` headers. Every key has a default; unknown keys are rejected.
//
//   [topology]
//   width = 5
//   io_mode = edge_only
//   sim.rate = 0.2        # fully-qualified keys work anywhere
class Config {
 public:
  Config();

  void load_file(const std::filesystem::path& path);
  void parse(std::istream& in, std::string_view origin);
  // `key=value`, as given to --set.
  void set_assignment(std::string_view assignment);
  void set(std::string_view key, std::string_view value);

  const std::string& get(std::string_view key) const;
  double get_double(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  // Comma-separated list, empty items dropped.
  std::vector<std::string> get_list(std::string_view key) const;

  const std::map<std::string, std::string, std::less<>>& values() const {
    return values_;
  }
  static const std::map<std::string, std::string, std::less<>>& defaults();

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

// "lo:hi:step" (inclusive) or a comma-separated list.
std::vector<double> parse_rates(std::string_view text);
std::vector<std::uint64_t> parse_seeds(std::string_view text);

}  // namespace qstar

#endif  // QSTAR_CONFIG_H_
