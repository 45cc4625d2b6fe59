#pragma once

#include <cmath>
#include <string>

#include "oct/errors.hpp"
#include "oct/format.hpp"
#include "oct/params.hpp"

namespace oct {

/// Component masses of a design and the resulting system mass, in kg.
struct MassBreakdown {
  double rotor_mass = 0.0;
  double generator_mass = 0.0;
  double tank_mass = 0.0;
  double total_mass = 0.0;
};

/// Rotor mass from the wind-turbine scaling law alpha1 * (d/2)^alpha2.
inline double rotor_mass(double diameter, const TurbineParameters& params) {
  if (!(diameter > 0.0)) {
    throw InputError("rotor diameter must be > 0, got " + format_double(diameter));
  }
  return params.alpha1 * std::pow(0.5 * diameter, params.alpha2);
}

/// Generator mass beta1 * P^beta2 with P the rated power in kW.
inline double generator_mass(double rated_power, const TurbineParameters& params) {
  if (!(rated_power > 0.0)) {
    throw InputError("generator rating must be > 0, got " + format_double(rated_power));
  }
  return params.beta1 * std::pow(rated_power, params.beta2);
}

/// Tank mass, linear in the volume deviation from the base tank.
inline double tank_mass(double volume, const TurbineParameters& params) {
  if (!(volume > 0.0)) {
    throw InputError("tank volume must be > 0, got " + format_double(volume));
  }
  const double m = params.base_tank_mass + params.gamma1 * (volume - params.base_tank_volume);
  if (!(m > 0.0)) {
    throw InfeasibleError("tank volume " + format_double(volume) +
                          " m^3 gives non-positive tank mass " + format_double(m) + " kg");
  }
  return m;
}

/// Total mass = base total + the three component deviations. Deviations are
/// taken against the tabulated base masses, while the reported component
/// masses are the scaling-law values; at the base design this leaves the
/// rotor deviation at about -382 kg.
inline MassBreakdown total_mass(const DesignVector& design, const TurbineParameters& params) {
  MassBreakdown m;
  m.rotor_mass = rotor_mass(design.rotor_diameter, params);
  m.generator_mass = generator_mass(design.generator_rating, params);
  m.tank_mass = tank_mass(design.tank_volume, params);
  m.total_mass = params.base_total_mass + (m.rotor_mass - params.base_rotor_mass) +
                 (m.generator_mass - params.base_generator_mass) +
                 (m.tank_mass - params.base_tank_mass);
  if (!(m.total_mass > 0.0)) {
    throw InfeasibleError("design gives non-positive total mass " + format_double(m.total_mass));
  }
  return m;
}

}  // namespace oct
