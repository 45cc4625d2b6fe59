#pragma once

// Numerical linearization of the turbine dynamics about a nominal condition,
//   d(dx)/dt = A dx + B du,
// with the 13 reduced states [u v w p_b p_r q r x y z phi theta psi] (the
// rotor angle is dropped) and the inputs [B_f B_a tau_em].

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "oct/dynamics.hpp"
#include "oct/errors.hpp"
#include "oct/surrogate.hpp"

namespace oct::dynamics {

inline constexpr int kReducedStates = 13;
inline constexpr int kInputs = 3;

using Vector13 = Eigen::Matrix<double, kReducedStates, 1>;
using Vector3 = Eigen::Matrix<double, kInputs, 1>;
using MatrixA = Eigen::Matrix<double, kReducedStates, kReducedStates>;
using MatrixB = Eigen::Matrix<double, kReducedStates, kInputs>;

struct LinearModel {
  MatrixA A = MatrixA::Zero();
  MatrixB B = MatrixB::Zero();
  Vector13 x_eq = Vector13::Zero();
  Vector3 u_eq = Vector3::Zero();
  /// ||f(x_eq, u_eq)||, the distance of the nominal point from equilibrium.
  double equilibrium_residual = 0.0;
};

/// Nominal operating point of the 700 kW machine at 1.6 m/s.
inline Vector13 nominal_state() {
  Vector13 x;
  x << 0.0, 0.0, 0.0, 0.0, 1.49, 0.0, 0.0, 554.50, 0.38, 50.0, 0.01, 0.00, 3.14;
  return x;
}

inline Vector3 nominal_controls() { return Vector3(0.4677, 0.4677, -188280.0); }

inline RigidBodyState expand_reduced(const Vector13& x) {
  RigidBodyState s;
  s.velocity = x.segment<3>(0);
  s.rates = Eigen::Vector3d(x(3), x(5), x(6));
  s.rotor_rate = x(4);
  s.position = x.segment<3>(7);
  s.euler = x.segment<3>(10);
  s.rotor_angle = 0.0;
  return s;
}

inline Controls to_controls(const Vector3& u) { return {u(0), u(1), u(2)}; }

/// Reduced-state derivative f(x, u) under `force_model(state, controls)`.
template <typename ForceModel>
Vector13 reduced_derivative(const RigidBody& body, ForceModel&& force_model, const Vector13& x, const Vector3& u) {
  const RigidBodyState s = expand_reduced(x);
  const Vector14 d = body.state_derivative(s, force_model(s, to_controls(u)));
  // full order: [x y z u v w phi theta psi p_b q r p_r phi_r]
  Vector13 out;
  out << d(3), d(4), d(5), d(9), d(12), d(10), d(11), d(0), d(1), d(2), d(6), d(7), d(8);
  return out;
}

/// Central-difference Jacobian of f at x0. Step for entry i is
/// rel_step * max(1, |x0_i|).
template <typename F, typename Vec>
Eigen::MatrixXd central_difference_jacobian(F&& f, const Vec& x0, double rel_step) {
  const Eigen::VectorXd f0 = f(x0);
  Eigen::MatrixXd J(f0.size(), x0.size());
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x0(i)));
    Vec xp = x0;
    Vec xm = x0;
    xp(i) += h;
    xm(i) -= h;
    J.col(i) = (f(xp) - f(xm)) / (xp(i) - xm(i));
  }
  return J;
}

/// Linearizes the reduced dynamics about (x_eq, u_eq) by central differences.
/// A non-equilibrium nominal point is accepted; its residual is reported.
template <typename ForceModel>
LinearModel linearize(ForceModel&& force_model, const Vector13& x_eq, const Vector3& u_eq,
                      const InertiaSet& inertia, double rel_step = 1e-5) {
  if (!(rel_step > 0.0)) throw InputError("finite-difference step must be > 0");
  const RigidBody body(inertia);
  LinearModel lm;
  lm.x_eq = x_eq;
  lm.u_eq = u_eq;
  lm.equilibrium_residual = reduced_derivative(body, force_model, x_eq, u_eq).norm();

  lm.A = central_difference_jacobian(
      [&](const Vector13& x) -> Eigen::VectorXd { return reduced_derivative(body, force_model, x, u_eq); }, x_eq,
      rel_step);
  lm.B = central_difference_jacobian(
      [&](const Vector3& u) -> Eigen::VectorXd { return reduced_derivative(body, force_model, x_eq, u); }, u_eq,
      rel_step);
  if (!lm.A.allFinite() || !lm.B.allFinite() || !std::isfinite(lm.equilibrium_residual)) {
    throw NumericalError("linearization produced non-finite entries (step " + format_double(rel_step) + ")");
  }
  return lm;
}

}  // namespace oct::dynamics
