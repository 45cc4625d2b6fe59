#pragma once

// A deliberately simple, smooth stand-in for the turbine's hydrodynamic,
// buoyancy and mooring loads. It exists so the rigid-body equations,
// integrator and linearization can be exercised end to end; it is not a
// physical model of the turbine.
//
//   buoyancy  F_z = -buoyancy_per_fill * ((B_f - trim_fill) + (B_a - trim_fill))   (inertial, z down)
//   pitch     M_y = tank_arm * buoyancy_per_fill * (B_f - B_a)
//   drag      F   = 1/2 rho drag_area |v_rel| v_rel,  v_rel = current * e_x - R v_body
//   tether    F  += -tether_stiffness * (position - tether_rest)
//   damping   M  += -rotational_damping * [p_b q r]
//   rotor     M_x_r = -torque_coefficient * u_rel^2,  u_rel = body-x relative flow
//   shaft     tau_em = commanded torque

#include <cmath>

#include <Eigen/Dense>

#include "oct/dynamics.hpp"

namespace oct::dynamics {

/// Control inputs of the linear model: fill fractions and generator torque.
struct Controls {
  double forward_fill = 0.0;
  double aft_fill = 0.0;
  double shaft_torque = 0.0;  // N m
};

struct SurrogateEnvironment {
  double current_speed = 1.6;        // m/s along inertial +x
  double water_density = 1025.0;     // kg/m^3
  double buoyancy_per_fill = 3.14e5; // N per unit fill per tank (31.215 m^3 of seawater)
  double trim_fill = 0.4677;         // fill giving neutral buoyancy
  double tank_arm = 5.0;             // m between tank centre and CG
  double drag_area = 250.0;          // m^2, C_d * A
  double tether_stiffness = 1.0e4;   // N/m
  Eigen::Vector3d tether_rest{554.50, 0.38, 50.0};
  double torque_coefficient = 73547.0;  // N m s^2/m^2, balances -188280 N m at 1.6 m/s
  double rotational_damping = 1.0e6;    // N m s
};

inline ForceSet surrogate_force_model(const RigidBodyState& s, const Controls& u, const SurrogateEnvironment& env) {
  const Eigen::Matrix3d R = RigidBody::body_to_inertial(s.euler(0), s.euler(1), s.euler(2));

  Eigen::Vector3d f_inertial = Eigen::Vector3d::Zero();
  f_inertial(2) = -env.buoyancy_per_fill * ((u.forward_fill - env.trim_fill) + (u.aft_fill - env.trim_fill));

  const Eigen::Vector3d v_rel = env.current_speed * Eigen::Vector3d::UnitX() - R * s.velocity;
  f_inertial += 0.5 * env.water_density * env.drag_area * v_rel.norm() * v_rel;
  f_inertial += -env.tether_stiffness * (s.position - env.tether_rest);

  ForceSet f;
  f.forces = R.transpose() * f_inertial;
  f.moments = -env.rotational_damping * s.rates;
  f.moments(1) += env.tank_arm * env.buoyancy_per_fill * (u.forward_fill - u.aft_fill);

  const double u_rel = (R.transpose() * v_rel)(0);
  f.rotor_moment = -env.torque_coefficient * u_rel * u_rel;
  f.shaft_torque = u.shaft_torque;
  return f;
}

}  // namespace oct::dynamics
