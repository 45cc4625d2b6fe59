#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "oct/errors.hpp"
#include "oct/format.hpp"
#include "oct/params.hpp"

namespace oct {

inline constexpr double kSecondsPerHour = 3600.0;

/// Air fill fractions of the forward and aft buoyancy tanks (0 = flooded,
/// 1 = full of air, in units of the base tank).
struct FillState {
  double forward_fill = 0.0;
  double aft_fill = 0.0;

  bool operator==(const FillState&) const = default;
};

/// Per-step power terms in kW; net = generated - hold_depth_cost - change_depth_cost.
struct PowerBreakdown {
  double generated = 0.0;
  double hold_depth_cost = 0.0;
  double change_depth_cost = 0.0;
  double net = 0.0;
};

/// Admissible fill range for a design. A tank smaller than the base tank
/// shrinks the usable range proportionally.
struct FillLimits {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double b) const { return b >= lower && b <= upper; }
};

inline FillLimits fill_limits(const DesignVector& design, const TurbineParameters& params) {
  const double ratio = design.tank_volume / params.base_tank_volume;
  return {ratio * params.fill_min, ratio * params.fill_max};
}

/// Largest admissible |dB| over one step of dt hours.
inline double max_fill_change(double dt_hours, const TurbineParameters& params) {
  return params.fill_slew_max * dt_hours * kSecondsPerHour;
}

/// Rotor power, clamped at the generator rating. v in m/s, result in kW.
inline double generated_power(double v, const DesignVector& design, const TurbineParameters& params) {
  const double radius = 0.5 * design.rotor_diameter;
  const double kinetic_w = 0.5 * params.water_density * std::numbers::pi * radius * radius * v * v *
                           v * params.power_coefficient;
  return std::max(0.0, std::min(kinetic_w / 1000.0, design.generator_rating));
}

/// Pumping power to hold depth when the flow strengthens; zero for dv <= 0.
inline double hold_depth_power(double delta_v, double dt_hours, const TurbineParameters& params) {
  if (!(delta_v > 0.0)) return 0.0;
  return std::max(0.0, params.zeta * (params.kappa1 * delta_v) / dt_hours);
}

/// Pumping power to climb (dz < 0, depth measured downward); zero otherwise.
inline double change_depth_power(double delta_z, double dt_hours, const TurbineParameters& params) {
  if (!(delta_z < 0.0)) return 0.0;
  return std::max(0.0, params.zeta * (params.kappa2 * delta_z) / dt_hours);
}

/// Fill change needed to hold depth through a flow change dv and to move dz.
inline double fill_change(double delta_v, double delta_z, const TurbineParameters& params) {
  return params.kappa1 * delta_v + params.kappa2 * delta_z;
}

enum class FillCheck { ok, below_min, above_max, slew_limit };

inline std::string_view to_string(FillCheck c) {
  switch (c) {
    case FillCheck::ok: return "ok";
    case FillCheck::below_min: return "fill below minimum";
    case FillCheck::above_max: return "fill above maximum";
    case FillCheck::slew_limit: return "fill slew rate exceeded";
  }
  return "?";
}

/// Classifies a fill change `delta` arriving at fill level `fill`.
inline FillCheck check_fill(double fill, double delta, double dt_hours, const FillLimits& limits,
                            const TurbineParameters& params) {
  if (std::abs(delta) > max_fill_change(dt_hours, params)) return FillCheck::slew_limit;
  if (fill < limits.lower) return FillCheck::below_min;
  if (fill > limits.upper) return FillCheck::above_max;
  return FillCheck::ok;
}

struct FillTransition {
  FillState state;
  FillCheck status = FillCheck::ok;

  bool feasible() const { return status == FillCheck::ok; }
};

/// Applies one depth transition to both tanks. Both tanks receive the same
/// change; the returned status reports the first violated constraint.
inline FillTransition try_step_fill(const FillState& state, double delta_v, double delta_z,
                                    double dt_hours, const DesignVector& design,
                                    const TurbineParameters& params) {
  const double delta = fill_change(delta_v, delta_z, params);
  const FillLimits limits = fill_limits(design, params);
  FillTransition t;
  t.state = {state.forward_fill + delta, state.aft_fill + delta};
  t.status = check_fill(t.state.forward_fill, delta, dt_hours, limits, params);
  if (t.status == FillCheck::ok) t.status = check_fill(t.state.aft_fill, delta, dt_hours, limits, params);
  return t;
}

/// Throwing form of try_step_fill.
inline FillState step_fill(const FillState& state, double delta_v, double delta_z, double dt_hours,
                           const DesignVector& design, const TurbineParameters& params) {
  const FillTransition t = try_step_fill(state, delta_v, delta_z, dt_hours, design, params);
  if (!t.feasible()) {
    throw InfeasibleError("infeasible transition: " + std::string(to_string(t.status)) +
                          " (fill " + format_double(t.state.forward_fill) + ")");
  }
  return t.state;
}

/// Net power for one step that ends at flow speed v_next after moving dz.
inline PowerBreakdown net_power(double v_prev, double v_next, double delta_z, double dt_hours,
                                const DesignVector& design, const TurbineParameters& params) {
  PowerBreakdown p;
  p.generated = generated_power(v_next, design, params);
  p.hold_depth_cost = hold_depth_power(v_next - v_prev, dt_hours, params);
  p.change_depth_cost = change_depth_power(delta_z, dt_hours, params);
  p.net = p.generated - p.hold_depth_cost - p.change_depth_cost;
  return p;
}

}  // namespace oct
