#pragma once

// Seven-degree-of-freedom turbine dynamics: 6-DOF rigid body plus the rotor
// spinning about the body x axis. Depth is measured downward (z positive down),
// Euler angles are ZYX (roll phi, pitch theta, yaw psi).
//
// Masses, inertias and centres of gravity are inputs and are expected to
// already include the added (virtual) hydrodynamic contributions.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oct/errors.hpp"
#include "oct/format.hpp"

namespace oct::dynamics {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Vector7 = Eigen::Matrix<double, 7, 1>;
using Vector14 = Eigen::Matrix<double, 14, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

struct InertiaSet {
  double m = 0.0;    // total (virtual) mass, kg
  double m_b = 0.0;  // body mass
  double m_r = 0.0;  // rotor mass
  double x_cg = 0.0;
  double x_cg_b = 0.0;
  double x_cg_r = 0.0;
  double z_cg_b = 0.0;
  double I_x_b = 0.0;
  double I_y = 0.0;
  double I_z = 0.0;
  double I_xz_b = 0.0;
  double I_x_r = 0.0;
  double I_y_b = 0.0;
  double I_z_b = 0.0;
  double I_y_r = 0.0;
  double I_z_r = 0.0;
};

/// Illustrative inertia set of roughly the 700 kW machine's size. Not a
/// calibrated model.
inline InertiaSet default_inertia() {
  InertiaSet in;
  in.m = 5.0e5;
  in.m_b = 4.4e5;
  in.m_r = 6.0e4;
  in.x_cg = 0.5;
  in.x_cg_b = 0.4;
  in.x_cg_r = 5.0;
  in.z_cg_b = 0.3;
  in.I_x_b = 5.0e6;
  in.I_y = 2.0e7;
  in.I_z = 2.0e7;
  in.I_xz_b = 1.0e5;
  in.I_x_r = 2.0e6;
  in.I_y_b = 1.5e7;
  in.I_z_b = 1.5e7;
  in.I_y_r = 1.0e6;
  in.I_z_r = 1.0e6;
  return in;
}

inline void validate(const InertiaSet& in) {
  const auto positive = [](double x, const char* name) {
    if (!(std::isfinite(x) && x > 0.0)) throw InputError(std::string("inertia '") + name + "' must be > 0");
  };
  const auto finite = [](double x, const char* name) {
    if (!std::isfinite(x)) throw InputError(std::string("inertia '") + name + "' must be finite");
  };
  positive(in.m, "m");
  positive(in.m_b, "m_b");
  positive(in.m_r, "m_r");
  positive(in.I_x_b, "I_x_b");
  positive(in.I_y, "I_y");
  positive(in.I_z, "I_z");
  positive(in.I_x_r, "I_x_r");
  positive(in.I_y_b, "I_y_b");
  positive(in.I_z_b, "I_z_b");
  positive(in.I_y_r, "I_y_r");
  positive(in.I_z_r, "I_z_r");
  finite(in.x_cg, "x_cg");
  finite(in.x_cg_b, "x_cg_b");
  finite(in.x_cg_r, "x_cg_r");
  finite(in.z_cg_b, "z_cg_b");
  finite(in.I_xz_b, "I_xz_b");
}

/// Inertia file: `key = value` lines using the InertiaSet field names; keys
/// left out keep the default_inertia() value.
inline InertiaSet parse_inertia(std::string_view text, std::string_view source = "<inertia>") {
  InertiaSet in = default_inertia();
  const std::array<std::pair<const char*, double*>, 16> slots = {{
      {"m", &in.m},         {"m_b", &in.m_b},       {"m_r", &in.m_r},       {"x_cg", &in.x_cg},
      {"x_cg_b", &in.x_cg_b}, {"x_cg_r", &in.x_cg_r}, {"z_cg_b", &in.z_cg_b}, {"I_x_b", &in.I_x_b},
      {"I_y", &in.I_y},     {"I_z", &in.I_z},       {"I_xz_b", &in.I_xz_b}, {"I_x_r", &in.I_x_r},
      {"I_y_b", &in.I_y_b}, {"I_z_b", &in.I_z_b},   {"I_y_r", &in.I_y_r},   {"I_z_r", &in.I_z_r},
  }};
  for (const auto& kv : parse_key_value_lines(text, source)) {
    const std::string where = std::string(source) + ":" + std::to_string(kv.line) + ": ";
    auto it = std::find_if(slots.begin(), slots.end(), [&](const auto& s) { return kv.key == s.first; });
    if (it == slots.end()) throw InputError(where + "unknown inertia key '" + kv.key + "'");
    if (!try_parse_double(kv.value, *it->second)) {
      throw InputError(where + "malformed value '" + kv.value + "' for '" + kv.key + "'");
    }
  }
  validate(in);
  return in;
}

inline InertiaSet load_inertia(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open inertia file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_inertia(ss.str(), path);
}

/// The 14 nonlinear states.
struct RigidBodyState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // x, y, z (inertial, z down), m
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // u, v, w (body), m/s
  Eigen::Vector3d euler = Eigen::Vector3d::Zero();     // phi, theta, psi, rad
  Eigen::Vector3d rates = Eigen::Vector3d::Zero();     // p_b, q, r (body), rad/s
  double rotor_rate = 0.0;                             // p_r, rad/s
  double rotor_angle = 0.0;                            // phi_r, rad

  /// Packed as [x y z u v w phi theta psi p_b q r p_r phi_r].
  Vector14 to_vector() const {
    Vector14 s;
    s << position, velocity, euler, rates, rotor_rate, rotor_angle;
    return s;
  }

  static RigidBodyState from_vector(const Vector14& s) {
    RigidBodyState st;
    st.position = s.segment<3>(0);
    st.velocity = s.segment<3>(3);
    st.euler = s.segment<3>(6);
    st.rates = s.segment<3>(9);
    st.rotor_rate = s(12);
    st.rotor_angle = s(13);
    return st;
  }
};

/// Forces and moments in the body frame.
struct ForceSet {
  Eigen::Vector3d forces = Eigen::Vector3d::Zero();   // f_x, f_y, f_z, N
  Eigen::Vector3d moments = Eigen::Vector3d::Zero();  // M_x_b, M_y, M_z, N m
  double rotor_moment = 0.0;                          // M_x_r, N m
  double shaft_torque = 0.0;                          // tau_em, N m
};

/// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

/// Generalized mass matrix of the body DOFs [u v w p_b q r].
inline Matrix6 assemble_mass_matrix(const InertiaSet& in) {
  const double mz = in.m_b * in.z_cg_b;
  const double mx = in.m * in.x_cg;
  Matrix6 M;
  // clang-format off
  M <<  in.m,  0.0,   0.0,   0.0,         mz,    0.0,
        0.0,   in.m,  0.0,   -mz,         0.0,   mx,
        0.0,   0.0,   in.m,  0.0,         -mx,   0.0,
        0.0,   -mz,   0.0,   in.I_x_b,    0.0,   -in.I_xz_b,
        mz,    0.0,   -mx,   0.0,         in.I_y, 0.0,
        0.0,   mx,    0.0,   -in.I_xz_b,  0.0,   in.I_z;
  // clang-format on
  return M;
}

/// Right-hand side of the body equations: applied loads plus the Coriolis,
/// centripetal and rotor gyroscopic terms.
inline Vector6 assemble_forcing(const RigidBodyState& s, const ForceSet& f, const InertiaSet& in) {
  const double u = s.velocity(0), v = s.velocity(1), w = s.velocity(2);
  const double pb = s.rates(0), q = s.rates(1), r = s.rates(2);
  const double pr = s.rotor_rate;
  const double m = in.m, mb = in.m_b, mr = in.m_r;
  const double xcg = in.x_cg, xcgb = in.x_cg_b, xcgr = in.x_cg_r, zcgb = in.z_cg_b;

  Vector6 F;
  F(0) = f.forces(0) + m * (v * r - w * q) + m * xcg * (q * q + r * r) - mb * zcgb * pb * r;
  F(1) = f.forces(1) - m * u * r + w * (mb * pb + mr * pr) - mb * zcgb * q * r - mb * xcgb * q * pb -
         mr * xcgr * q * pr;
  F(2) = f.forces(2) + m * u * q - v * (mb * pb + mr * pr) + mb * zcgb * (pb * pb + q * q) -
         mb * xcgb * r * pb - mr * xcgr * r * pr;
  F(3) = f.moments(0) + f.shaft_torque - q * r * (in.I_z_b - in.I_y_b) + in.I_xz_b * pb * q -
         mb * zcgb * (w * pb - u * r);
  F(4) = f.moments(1) - r * pb * (in.I_x_b - in.I_z_b) - r * pr * (in.I_x_r - in.I_z_r) -
         in.I_xz_b * (pb * pb - r * r) + mb * zcgb * (v * r - w * q) - m * xcg * u * q +
         mb * xcgb * v * pb + mr * xcgr * v * pr;
  // The rotor term of this row is printed with a "virtual" rotor mass in the
  // source model; m_r is used, mirroring the previous row.
  F(5) = f.moments(2) - q * pb * (in.I_y_b - in.I_x_b) - q * pr * (in.I_y_r - in.I_x_r) -
         in.I_xz_b * r * q - m * xcg * u * r + mb * xcgb * w * pb + mr * xcgr * w * pr;
  return F;
}

/// Factorized mass matrix; construction rejects singular or badly
/// conditioned matrices.
class RigidBody {
 public:
  static constexpr double kMaxCondition = 1e12;

  explicit RigidBody(const InertiaSet& inertia) : inertia_(inertia), M_(assemble_mass_matrix(inertia)) {
    validate(inertia);
    Eigen::JacobiSVD<Matrix6> svd(M_);
    const auto& sv = svd.singularValues();
    if (!(sv(5) > 0.0) || sv(0) / sv(5) > kMaxCondition) {
      throw NumericalError("mass matrix is singular or ill-conditioned (condition number " +
                           format_double(sv(5) > 0.0 ? sv(0) / sv(5) : INFINITY) + ")");
    }
    lu_.compute(M_);
  }

  const InertiaSet& inertia() const { return inertia_; }
  const Matrix6& mass_matrix() const { return M_; }

  /// [u' v' w' p_b' q' r' p_r'].
  Vector7 accelerations(const RigidBodyState& s, const ForceSet& f) const {
    Vector7 a;
    a.head<6>() = lu_.solve(assemble_forcing(s, f, inertia_));
    const double q = s.rates(1), r = s.rates(2);
    a(6) = (f.rotor_moment - f.shaft_torque - q * r * (inertia_.I_z_r - inertia_.I_y_r)) / inertia_.I_x_r;
    return a;
  }

  /// Time derivative of the packed 14-state vector.
  Vector14 state_derivative(const RigidBodyState& s, const ForceSet& f) const {
    const Vector7 a = accelerations(s, f);
    const double phi = s.euler(0), theta = s.euler(1), psi = s.euler(2);
    const double p = s.rates(0), q = s.rates(1), r = s.rates(2);

    Vector14 d;
    d.segment<3>(0) = body_to_inertial(phi, theta, psi) * s.velocity;
    d.segment<3>(3) = a.head<3>();
    const double ct = std::cos(theta);
    d(6) = p + (q * std::sin(phi) + r * std::cos(phi)) * std::tan(theta);
    d(7) = q * std::cos(phi) - r * std::sin(phi);
    d(8) = (q * std::sin(phi) + r * std::cos(phi)) / ct;
    d.segment<3>(9) = a.segment<3>(3);
    d(12) = a(6);
    d(13) = s.rotor_rate;
    return d;
  }

  static Eigen::Matrix3d body_to_inertial(double phi, double theta, double psi) {
    return (Eigen::AngleAxisd(psi, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
  }

 private:
  InertiaSet inertia_;
  Matrix6 M_;
  Eigen::PartialPivLU<Matrix6> lu_;
};

/// [u' v' w' p_b' q' r' p_r'] for one state and load set.
inline Vector7 accelerations(const RigidBodyState& s, const ForceSet& f, const InertiaSet& inertia) {
  return RigidBody(inertia).accelerations(s, f);
}

inline constexpr double kGimbalLimit = 85.0 * std::numbers::pi / 180.0;

struct TrajectoryPoint {
  double time = 0.0;  // s
  RigidBodyState state;
};

/// Fixed-step RK4. `force_model(state, t)` returns the body-frame loads.
/// Angles are wrapped to (-pi, pi] after every step; pitch beyond 85 degrees
/// aborts with NumericalError.
template <typename ForceModel>
std::vector<TrajectoryPoint> integrate(const RigidBodyState& state0, ForceModel&& force_model,
                                       const InertiaSet& inertia, double dt, long steps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("integration step must be > 0");
  if (steps < 0) throw InputError("step count must be >= 0");
  const RigidBody body(inertia);

  const auto deriv = [&](const Vector14& x, double t) {
    const RigidBodyState s = RigidBodyState::from_vector(x);
    return body.state_derivative(s, force_model(s, t));
  };
  const auto check = [&](const Vector14& x, long step) {
    if (!x.allFinite()) throw NumericalError("non-finite state at step " + std::to_string(step));
    if (std::abs(x(7)) > kGimbalLimit) {
      throw NumericalError("pitch " + format_double(x(7) * 180.0 / std::numbers::pi) +
                           " deg exceeds the 85 deg gimbal limit at step " + std::to_string(step));
    }
  };

  std::vector<TrajectoryPoint> traj;
  traj.reserve(static_cast<std::size_t>(steps) + 1);
  Vector14 x = state0.to_vector();
  check(x, 0);
  traj.push_back({0.0, state0});
  for (long k = 0; k < steps; ++k) {
    const double t = dt * static_cast<double>(k);
    const Vector14 k1 = deriv(x, t);
    const Vector14 k2 = deriv(x + 0.5 * dt * k1, t + 0.5 * dt);
    const Vector14 k3 = deriv(x + 0.5 * dt * k2, t + 0.5 * dt);
    const Vector14 k4 = deriv(x + dt * k3, t + dt);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    for (int i : {6, 7, 8, 13}) x(i) = wrap_angle(x(i));
    check(x, k + 1);
    traj.push_back({dt * static_cast<double>(k + 1), RigidBodyState::from_vector(x)});
  }
  return traj;
}

inline std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& traj) {
  std::string out = "t_s,x_m,y_m,z_m,u_mps,v_mps,w_mps,phi_rad,theta_rad,psi_rad,p_b_radps,q_radps,r_radps,"
                    "p_r_radps,phi_r_rad\n";
  for (const auto& pt : traj) {
    out += format_double(pt.time);
    const Vector14 s = pt.state.to_vector();
    for (int i = 0; i < 14; ++i) {
      out += ',';
      out += format_double(s(i));
    }
    out += '\n';
  }
  return out;
}

}  // namespace oct::dynamics
