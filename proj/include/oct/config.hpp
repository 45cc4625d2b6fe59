#pragma once

// Flat `key = value` configuration files.
//
//   # comment
//   base_rotor_diameter = 20
//   lower.rotor_diameter = 2
//   horizon_steps = 2
//   ga.population_size = 20
//
// Unknown keys, duplicate keys and malformed values are hard errors. Keys that
// are absent keep their defaults; design bounds that are absent default to
// 0.1x / 1.1x of the (possibly overridden) base design.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "oct/errors.hpp"
#include "oct/format.hpp"
#include "oct/params.hpp"

namespace oct {

struct Config {
  TurbineParameters params;
  DesignBounds bounds = default_bounds(TurbineParameters{});
  PlannerConfig planner;
  GaConfig ga;

  bool operator==(const Config&) const = default;
};

namespace detail {

using ConfigSlot = std::variant<double*, int*, std::uint64_t*>;

struct ConfigKey {
  std::string name;
  ConfigSlot slot;
};

inline std::vector<ConfigKey> config_keys(Config& c) {
  auto& p = c.params;
  auto& pl = c.planner;
  auto& ga = c.ga;
  std::vector<ConfigKey> keys = {
      {"base_rotor_diameter", &p.base_rotor_diameter},
      {"base_generator_rating", &p.base_generator_rating},
      {"base_tank_volume", &p.base_tank_volume},
      {"depth_min", &p.depth_min},
      {"depth_max", &p.depth_max},
      {"fill_min", &p.fill_min},
      {"fill_max", &p.fill_max},
      {"fill_slew_max", &p.fill_slew_max},
      {"base_total_mass", &p.base_total_mass},
      {"base_rotor_mass", &p.base_rotor_mass},
      {"base_generator_mass", &p.base_generator_mass},
      {"base_tank_mass", &p.base_tank_mass},
      {"zeta", &p.zeta},
      {"kappa1", &p.kappa1},
      {"kappa2", &p.kappa2},
      {"alpha1", &p.alpha1},
      {"alpha2", &p.alpha2},
      {"beta1", &p.beta1},
      {"beta2", &p.beta2},
      {"gamma1", &p.gamma1},
      {"water_density", &p.water_density},
      {"power_coefficient", &p.power_coefficient},
      {"time_step", &pl.time_step},
      {"horizon_steps", &pl.horizon_steps},
      {"depth_levels", &pl.depth_levels},
      {"mission_hours", &pl.mission_hours},
      {"initial_depth", &pl.initial_depth},
      {"initial_fill", &pl.initial_fill},
      {"ga.population_size", &ga.population_size},
      {"ga.generations", &ga.generations},
      {"ga.tournament_size", &ga.tournament_size},
      {"ga.crossover_rate", &ga.crossover_rate},
      {"ga.mutation_stddev", &ga.mutation_stddev},
      {"ga.elite_count", &ga.elite_count},
      {"ga.rng_seed", &ga.rng_seed},
      {"ga.threads", &ga.threads},
  };
  for (auto g : kAllDesignParameters) {
    keys.push_back({"lower." + std::string(field_name(g)), &gene(c.bounds.lower, g)});
    keys.push_back({"upper." + std::string(field_name(g)), &gene(c.bounds.upper, g)});
  }
  return keys;
}

template <typename Int>
bool parse_integer(std::string_view s, Int& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace detail

/// Cross-field checks on a fully assembled configuration.
inline void validate(const Config& c) {
  validate(c.params);
  validate(c.bounds);
  validate(c.planner);
  validate(c.ga);
  if (c.planner.initial_depth < c.params.depth_min ||
      c.planner.initial_depth > c.params.depth_max) {
    throw InputError("invalid parameter 'initial_depth': must lie in [depth_min, depth_max]");
  }
  if (c.planner.initial_fill < c.params.fill_min || c.planner.initial_fill > c.params.fill_max) {
    throw InputError("invalid parameter 'initial_fill': must lie in [fill_min, fill_max]");
  }
}

/// Parses configuration text. `source` is used as the file name in messages.
inline Config parse_config(std::string_view text, std::string_view source = "<config>") {
  Config c;
  auto keys = detail::config_keys(c);
  std::set<std::string> seen;

  for (const auto& [key, value, line_no] : parse_key_value_lines(text, source)) {
    const auto where = [&, line_no = line_no] {
      return std::string(source) + ":" + std::to_string(line_no) + ": ";
    };
    auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& k) { return k.name == key; });
    if (it == keys.end()) throw InputError(where() + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw InputError(where() + "duplicate key '" + key + "'");

    const bool ok = std::visit(
        [&](auto* slot) {
          using T = std::remove_pointer_t<decltype(slot)>;
          if constexpr (std::is_same_v<T, double>) {
            return try_parse_double(value, *slot) && std::isfinite(*slot);
          } else {
            return detail::parse_integer(value, *slot);
          }
        },
        it->slot);
    if (!ok) {
      throw InputError(where() + "malformed value '" + value + "' for '" + key + "'");
    }
  }

  // Bounds not given explicitly follow the base design.
  const DesignBounds derived = default_bounds(c.params);
  for (auto g : kAllDesignParameters) {
    const std::string name(field_name(g));
    if (!seen.count("lower." + name)) gene(c.bounds.lower, g) = gene(derived.lower, g);
    if (!seen.count("upper." + name)) gene(c.bounds.upper, g) = gene(derived.upper, g);
  }

  validate(c);
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

/// Writes every key, so the output is a complete snapshot of `c`.
inline std::string serialize_config(const Config& c) {
  Config copy = c;
  std::string out;
  for (const auto& k : detail::config_keys(copy)) {
    out += k.name;
    out += " = ";
    std::visit(
        [&](auto* slot) {
          using T = std::remove_pointer_t<decltype(slot)>;
          if constexpr (std::is_same_v<T, double>) {
            out += format_double(*slot);
          } else {
            out += std::to_string(*slot);
          }
        },
        k.slot);
    out += '\n';
  }
  return out;
}

}  // namespace oct
