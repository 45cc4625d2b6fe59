#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "oct/errors.hpp"

namespace oct {

/// Physical constants of the buoyancy-controlled turbine and its scaling laws.
/// Units: m, kW, m^3 (per tank), kg, kWh, s. Defaults are the 700 kW baseline
/// machine.
struct TurbineParameters {
  double base_rotor_diameter = 20.0;     // m
  double base_generator_rating = 700.0;  // kW
  double base_tank_volume = 31.215;      // m^3, each of the two tanks

  double depth_min = 50.0;   // m
  double depth_max = 150.0;  // m
  double fill_min = 0.0;
  double fill_max = 1.0;
  double fill_slew_max = 7.45e-4;  // 1/s

  double base_total_mass = 497800.0;    // kg
  double base_rotor_mass = 61573.0;     // kg
  double base_generator_mass = 2246.9;  // kg
  double base_tank_mass = 20427.0;      // kg

  double zeta = 14.02;      // kWh
  double kappa1 = 0.65;     // s/m, fill change per unit flow change
  double kappa2 = -0.0026;  // 1/m, fill change per unit depth change

  double alpha1 = 74.2832;  // rotor mass: alpha1 * (d/2)^alpha2
  double alpha2 = 2.9158;
  double beta1 = 5.34;  // generator mass: beta1 * P^beta2
  double beta2 = 0.9223;
  double gamma1 = 650.0721;  // kg per m^3 of tank volume

  double water_density = 1025.0;  // kg/m^3
  double power_coefficient = 0.45;

  bool operator==(const TurbineParameters&) const = default;
};

/// Outer-loop decision variables.
struct DesignVector {
  double generator_rating = 0.0;  // kW
  double rotor_diameter = 0.0;    // m
  double tank_volume = 0.0;       // m^3

  bool operator==(const DesignVector&) const = default;
};

/// The three genes of a DesignVector, in storage order.
enum class DesignParameter : int { generator = 0, rotor = 1, tank = 2 };

inline constexpr std::array<DesignParameter, 3> kAllDesignParameters = {
    DesignParameter::generator, DesignParameter::rotor, DesignParameter::tank};

inline std::string_view to_string(DesignParameter p) {
  switch (p) {
    case DesignParameter::generator: return "generator";
    case DesignParameter::rotor: return "rotor";
    case DesignParameter::tank: return "tank";
  }
  return "?";
}

/// Field name of the gene inside DesignVector (also its config-file key suffix).
inline std::string_view field_name(DesignParameter p) {
  switch (p) {
    case DesignParameter::generator: return "generator_rating";
    case DesignParameter::rotor: return "rotor_diameter";
    case DesignParameter::tank: return "tank_volume";
  }
  return "?";
}

inline DesignParameter parse_design_parameter(std::string_view name) {
  if (name == "generator") return DesignParameter::generator;
  if (name == "rotor") return DesignParameter::rotor;
  if (name == "tank") return DesignParameter::tank;
  throw UsageError("unknown design parameter '" + std::string(name) +
                   "' (expected rotor, generator or tank)");
}

inline double& gene(DesignVector& d, DesignParameter p) {
  switch (p) {
    case DesignParameter::generator: return d.generator_rating;
    case DesignParameter::rotor: return d.rotor_diameter;
    case DesignParameter::tank: return d.tank_volume;
  }
  return d.generator_rating;
}

inline double gene(const DesignVector& d, DesignParameter p) {
  return gene(const_cast<DesignVector&>(d), p);
}

struct DesignBounds {
  DesignVector lower;
  DesignVector upper;

  bool contains(const DesignVector& d) const {
    for (auto p : kAllDesignParameters) {
      if (gene(d, p) < gene(lower, p) || gene(d, p) > gene(upper, p)) return false;
    }
    return true;
  }

  DesignVector clamp(DesignVector d) const {
    for (auto p : kAllDesignParameters) {
      gene(d, p) = std::clamp(gene(d, p), gene(lower, p), gene(upper, p));
    }
    return d;
  }

  bool operator==(const DesignBounds&) const = default;
};

/// Receding-horizon planner settings. Times are in hours.
struct PlannerConfig {
  double time_step = 1.0;
  int horizon_steps = 2;
  int depth_levels = 17;
  int mission_hours = 336;
  double initial_depth = 50.0;
  double initial_fill = 0.4677;

  bool operator==(const PlannerConfig&) const = default;
};

/// Genetic-algorithm settings for the outer design loop.
struct GaConfig {
  int population_size = 20;
  int generations = 30;
  int tournament_size = 2;
  double crossover_rate = 0.9;
  double mutation_stddev = 0.05;  // fraction of each gene's bound range
  int elite_count = 2;
  std::uint64_t rng_seed = 1;
  int threads = 1;  // concurrent fitness evaluations per generation

  bool operator==(const GaConfig&) const = default;
};

inline DesignVector default_design(const TurbineParameters& params) {
  return {params.base_generator_rating, params.base_rotor_diameter, params.base_tank_volume};
}

inline DesignBounds default_bounds(const TurbineParameters& params, double lower_factor = 0.1,
                                   double upper_factor = 1.1) {
  const DesignVector base = default_design(params);
  DesignBounds b;
  for (auto p : kAllDesignParameters) {
    gene(b.lower, p) = lower_factor * gene(base, p);
    gene(b.upper, p) = upper_factor * gene(base, p);
  }
  return b;
}

namespace detail {

inline void require(bool ok, std::string_view field, std::string_view rule) {
  if (!ok) {
    throw InputError("invalid parameter '" + std::string(field) + "': " + std::string(rule));
  }
}

inline bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace detail

inline void validate(const TurbineParameters& p) {
  using detail::finite_positive;
  using detail::require;
  require(finite_positive(p.base_rotor_diameter), "base_rotor_diameter", "must be > 0");
  require(finite_positive(p.base_generator_rating), "base_generator_rating", "must be > 0");
  require(finite_positive(p.base_tank_volume), "base_tank_volume", "must be > 0");
  require(finite_positive(p.base_total_mass), "base_total_mass", "must be > 0");
  require(finite_positive(p.base_rotor_mass), "base_rotor_mass", "must be > 0");
  require(finite_positive(p.base_generator_mass), "base_generator_mass", "must be > 0");
  require(finite_positive(p.base_tank_mass), "base_tank_mass", "must be > 0");
  require(std::isfinite(p.depth_min) && std::isfinite(p.depth_max) && p.depth_min < p.depth_max,
          "depth_min", "depth_min < depth_max required");
  require(std::isfinite(p.fill_min) && std::isfinite(p.fill_max) && p.fill_min < p.fill_max,
          "fill_min", "fill_min < fill_max required");
  require(finite_positive(p.fill_slew_max), "fill_slew_max", "must be > 0");
  require(finite_positive(p.zeta), "zeta", "must be > 0");
  require(std::isfinite(p.kappa1), "kappa1", "must be finite");
  require(std::isfinite(p.kappa2) && p.kappa2 < 0.0, "kappa2", "must be < 0");
  require(finite_positive(p.alpha1), "alpha1", "must be > 0");
  require(finite_positive(p.alpha2), "alpha2", "must be > 0");
  require(finite_positive(p.beta1), "beta1", "must be > 0");
  require(finite_positive(p.beta2), "beta2", "must be > 0");
  require(finite_positive(p.gamma1), "gamma1", "must be > 0");
  require(finite_positive(p.water_density), "water_density", "must be > 0");
  require(finite_positive(p.power_coefficient), "power_coefficient", "must be > 0");
}

inline void validate(const DesignBounds& b) {
  for (auto p : kAllDesignParameters) {
    const std::string name(field_name(p));
    const double lo = gene(b.lower, p);
    const double hi = gene(b.upper, p);
    detail::require(std::isfinite(lo) && lo > 0.0, "lower." + name, "lower > 0 required");
    detail::require(std::isfinite(hi) && lo < hi, "upper." + name, "lower < upper required");
  }
}

inline void validate(const PlannerConfig& c) {
  using detail::require;
  require(std::isfinite(c.time_step) && c.time_step > 0.0, "time_step", "must be > 0");
  require(c.horizon_steps >= 1, "horizon_steps", "must be >= 1");
  require(c.depth_levels >= 2, "depth_levels", "must be >= 2");
  require(c.mission_hours >= 1, "mission_hours", "must be >= 1");
  require(std::isfinite(c.initial_depth), "initial_depth", "must be finite");
  require(std::isfinite(c.initial_fill), "initial_fill", "must be finite");
}

inline void validate(const GaConfig& c) {
  using detail::require;
  require(c.population_size >= 4, "ga.population_size", "must be >= 4");
  require(c.generations >= 0, "ga.generations", "must be >= 0");
  require(c.tournament_size >= 1 && c.tournament_size <= c.population_size,
          "ga.tournament_size", "must lie in [1, population_size]");
  require(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0, "ga.crossover_rate",
          "must lie in [0, 1]");
  require(c.mutation_stddev >= 0.0 && c.mutation_stddev <= 1.0, "ga.mutation_stddev",
          "must lie in [0, 1]");
  require(c.elite_count >= 0 && c.elite_count < c.population_size, "ga.elite_count",
          "must lie in [0, population_size)");
  require(c.threads >= 1, "ga.threads", "must be >= 1");
}

}  // namespace oct
