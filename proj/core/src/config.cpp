/*
 * Copyright 2026 The clustersim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "clustersim/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

#include "clustersim/errors.hpp"

namespace clustersim {

namespace {

struct Field {
  const char* key;
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) throw ConfigError("config: invalid value '" + v + "' for " + key);
  return out;
}

template <>
double parse_number<double>(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw ConfigError("config: invalid value '" + v + "' for " + key);
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class Owner>
Field number(const char* key, Owner SimConfig::*part, T Owner::*member) {
  return Field{key,
               [=](SimConfig& c, const std::string& v) { (c.*part).*member = parse_number<T>(key, v); },
               [=](const SimConfig& c) {
                 if constexpr (std::is_floating_point_v<T>) {
                   return fmt_double((c.*part).*member);
                 } else {
                   return std::to_string((c.*part).*member);
                 }
               }};
}

const std::vector<Field>& fields() {
  using machine::ClusterConfig;
  using kernels::TraceCosts;
  static const std::vector<Field> table = {
      number("n_workers", &SimConfig::cluster, &ClusterConfig::n_workers),
      number("spm_bytes", &SimConfig::cluster, &ClusterConfig::spm_bytes),
      number("spm_banks", &SimConfig::cluster, &ClusterConfig::spm_banks),
      number("freq_hz", &SimConfig::cluster, &ClusterConfig::freq_hz),
      number("group_bw_bytes_per_s", &SimConfig::cluster, &ClusterConfig::group_bw_bytes_per_s),
      number("n_clusters_per_group", &SimConfig::cluster, &ClusterConfig::n_clusters_per_group),
      number("n_groups_per_chiplet", &SimConfig::cluster, &ClusterConfig::n_groups_per_chiplet),
      number("n_chiplets", &SimConfig::cluster, &ClusterConfig::n_chiplets),
      number("active_clusters_per_group", &SimConfig::cluster, &ClusterConfig::active_clusters_per_group),
      number("cluster_port_bytes_per_cycle", &SimConfig::cluster, &ClusterConfig::cluster_port_bytes_per_cycle),
      number("dma_startup_cycles", &SimConfig::cluster, &ClusterConfig::dma_startup_cycles),
      number("fpu_latency", &SimConfig::cluster, &ClusterConfig::fpu_latency),
      number("cost.su_setup", &SimConfig::costs, &TraceCosts::su_setup),
      number("cost.loop_setup", &SimConfig::costs, &TraceCosts::loop_setup),
      number("cost.loop_overhead", &SimConfig::costs, &TraceCosts::loop_overhead),
      number("cost.branch_penalty", &SimConfig::costs, &TraceCosts::branch_penalty),
      number("cost.dot_setup", &SimConfig::costs, &TraceCosts::dot_setup),
  };
  return table;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      f.set(cfg, value);
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

SimConfig parse_config(std::string_view text, SimConfig cfg) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    try {
      set_config_value(cfg, trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

KeyValues materialize(const SimConfig& cfg) {
  KeyValues out;
  for (const Field& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

}  // namespace clustersim
