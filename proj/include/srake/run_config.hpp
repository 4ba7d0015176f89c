// Copyright 2026 The srake Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SRAKE_RUN_CONFIG_HPP
#define SRAKE_RUN_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "srake/sim.hpp"

// JSON run configuration. The schema is strict: unknown keys are rejected,
// every diagnostic names the offending location (line for syntax errors,
// JSON pointer for schema errors). See README for the full schema.

namespace srake {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class InterferenceProfile { Equal, MaiLimited };

struct RunConfig {
  SystemConfig system;  // noise_var is a placeholder; the sweep fills it in
  SweepSpec sweep;
  std::uint64_t seed = 0;
  std::string raw_text;  // exact file contents, hashed into output metadata
};

namespace config_detail {

using nlohmann::json;

inline void require_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
T get_required(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "/" + key + ": wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& where, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "/" + key + ": wrong type");
  }
}

inline int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace config_detail

inline RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  using nlohmann::json;
  namespace cd = config_detail;

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" + std::to_string(cd::line_of_offset(text, e.byte)) + ": " +
                      e.what());
  }
  if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");
  cd::require_keys(root, origin, {"system", "sweep", "ga", "seed", "exhaustive_budget"});

  RunConfig rc;
  rc.raw_text = text;
  rc.seed = cd::get_or<std::uint64_t>(root, origin, "seed", 0);

  if (!root.contains("system") || !root["system"].is_object())
    throw ConfigError(origin + ": missing 'system' object");
  const json& sys = root["system"];
  const std::string sys_where = origin + "/system";
  cd::require_keys(sys, sys_where,
                   {"users", "paths", "fingers", "chips_per_frame", "th_range", "desired_energy",
                    "decay", "shadow_var"});
  SystemConfig& cfg = rc.system;
  cfg.users = cd::get_required<int>(sys, sys_where, "users");
  cfg.paths = cd::get_required<int>(sys, sys_where, "paths");
  cfg.fingers = cd::get_required<int>(sys, sys_where, "fingers");
  cfg.chips_per_frame = cd::get_required<int>(sys, sys_where, "chips_per_frame");
  cfg.th_range = cd::get_or<int>(sys, sys_where, "th_range", cfg.chips_per_frame - cfg.paths);
  cfg.decay = cd::get_required<double>(sys, sys_where, "decay");
  cfg.shadow_var = cd::get_required<double>(sys, sys_where, "shadow_var");
  const double e1 = cd::get_or<double>(sys, sys_where, "desired_energy", 1.0);

  if (!root.contains("sweep") || !root["sweep"].is_object())
    throw ConfigError(origin + ": missing 'sweep' object");
  const json& sw = root["sweep"];
  const std::string sw_where = origin + "/sweep";
  cd::require_keys(sw, sw_where,
                   {"axis", "values", "ebno_db", "trials", "methods", "interference"});
  SweepSpec& spec = rc.sweep;
  const std::string axis = cd::get_required<std::string>(sw, sw_where, "axis");
  if (axis == "ebno_db") {
    spec.axis = SweepSpec::Axis::EbnoDb;
  } else if (axis == "fingers") {
    spec.axis = SweepSpec::Axis::Fingers;
    if (!sw.contains("ebno_db"))
      throw ConfigError(sw_where + ": 'ebno_db' is required when axis is 'fingers'");
  } else {
    throw ConfigError(sw_where + "/axis: must be 'ebno_db' or 'fingers'");
  }
  spec.values = cd::get_required<std::vector<double>>(sw, sw_where, "values");
  if (spec.axis == SweepSpec::Axis::Fingers) {
    for (double v : spec.values)
      if (v != std::floor(v))
        throw ConfigError(sw_where + "/values: finger counts must be integers");
  }
  spec.fixed_ebno_db = cd::get_or<double>(sw, sw_where, "ebno_db", 20.0);
  spec.trials = cd::get_or<int>(sw, sw_where, "trials", 500);
  const auto method_names = cd::get_required<std::vector<std::string>>(sw, sw_where, "methods");
  for (const auto& name : method_names) {
    const auto m = parse_method(name);
    if (!m) throw ConfigError(sw_where + "/methods: unknown method '" + name + "'");
    for (Method seen : spec.methods)
      if (seen == *m) throw ConfigError(sw_where + "/methods: duplicate method '" + name + "'");
    spec.methods.push_back(*m);
  }

  const std::string profile = cd::get_or<std::string>(sw, sw_where, "interference", "equal");
  double interferer = e1;
  if (profile == "mai_limited") {
    interferer = 10.0 * e1;  // every interferer 10 dB above the desired user
  } else if (profile != "equal") {
    throw ConfigError(sw_where + "/interference: must be 'equal' or 'mai_limited'");
  }
  cfg.energies = make_energies(cfg.users, e1, interferer);
  cfg.noise_var = 1.0;  // placeholder until the sweep fixes the grid point

  spec.exhaustive_budget =
      cd::get_or<std::uint64_t>(root, origin, "exhaustive_budget", kDefaultExhaustiveBudget);

  if (root.contains("ga")) {
    const json& ga = root["ga"];
    const std::string ga_where = origin + "/ga";
    if (!ga.is_object()) throw ConfigError(ga_where + ": must be an object");
    cd::require_keys(ga, ga_where,
                     {"initial_population", "population", "parents", "mutations", "iterations"});
    spec.ga.initial_population =
        cd::get_or<int>(ga, ga_where, "initial_population", spec.ga.initial_population);
    spec.ga.population = cd::get_or<int>(ga, ga_where, "population", spec.ga.population);
    spec.ga.parents = cd::get_or<int>(ga, ga_where, "parents", spec.ga.parents);
    spec.ga.mutations = cd::get_or<int>(ga, ga_where, "mutations", spec.ga.mutations);
    spec.ga.iterations = cd::get_or<int>(ga, ga_where, "iterations", spec.ga.iterations);
  }

  // Fail now, not mid-sweep.
  try {
    spec.validate();
    spec.ga.validate();
    for (double value : spec.values) config_at(cfg, spec, value).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path);
}

/// FNV-1a over the raw config bytes; embedded in output metadata.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace srake

#endif  // SRAKE_RUN_CONFIG_HPP
