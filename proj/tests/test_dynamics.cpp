#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oct/dynamics.hpp"
#include "oct/linearize.hpp"
#include "oct/surrogate.hpp"
#include "oracles.hpp"

namespace {

namespace dyn = oct::dynamics;

TEST(MassMatrix, DecoupledIsDiagonal) {
  dyn::InertiaSet in = dyn::default_inertia();
  in.x_cg = in.x_cg_b = in.z_cg_b = in.I_xz_b = 0.0;
  dyn::Matrix6 expected = dyn::Matrix6::Zero();
  expected.diagonal() << in.m, in.m, in.m, in.I_x_b, in.I_y, in.I_z;
  EXPECT_EQ(dyn::assemble_mass_matrix(in), expected);
}

TEST(MassMatrix, UnitBodyIsIdentity) {
  EXPECT_EQ(dyn::assemble_mass_matrix(oct_test::decoupled_inertia()), dyn::Matrix6::Identity());
}

TEST(MassMatrix, SymmetricForRandomInertia) {
  oct::Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto M = dyn::assemble_mass_matrix(oct_test::random_inertia(rng));
    ASSERT_EQ(M, M.transpose());
  }
}

TEST(Forcing, RestIsZero) {
  EXPECT_EQ(dyn::assemble_forcing(dyn::RigidBodyState{}, dyn::ForceSet{}, dyn::default_inertia()),
            dyn::Vector6::Zero());
}

TEST(Forcing, PurePitchRate) {
  dyn::InertiaSet in = dyn::default_inertia();
  dyn::RigidBodyState s;
  const double q = 0.2;
  s.rates(1) = q;
  const auto F = dyn::assemble_forcing(s, dyn::ForceSet{}, in);
  EXPECT_DOUBLE_EQ(F(0), in.m * in.x_cg * q * q);
  EXPECT_DOUBLE_EQ(F(1), 0.0);
  EXPECT_DOUBLE_EQ(F(2), in.m_b * in.z_cg_b * q * q);
  EXPECT_DOUBLE_EQ(F(3), 0.0);
  EXPECT_DOUBLE_EQ(F(4), 0.0);
  EXPECT_DOUBLE_EQ(F(5), 0.0);
}

TEST(Forcing, ForcesPassThroughAtRest) {
  dyn::ForceSet f;
  f.forces << 1.0, -2.0, 3.0;
  const auto F = dyn::assemble_forcing(dyn::RigidBodyState{}, f, dyn::default_inertia());
  EXPECT_EQ(F.head<3>(), f.forces);
}

TEST(Forcing, ShaftTorqueEntersRollRow) {
  dyn::ForceSet f;
  f.shaft_torque = 123.0;
  EXPECT_EQ(dyn::assemble_forcing(dyn::RigidBodyState{}, f, dyn::default_inertia())(3), 123.0);
}

TEST(Accelerations, NewtonCheck) {
  const auto in = oct_test::decoupled_inertia(4.0, 2.0);
  dyn::ForceSet f;
  f.forces(0) = 4.0 * 1.5;
  EXPECT_DOUBLE_EQ(dyn::accelerations(dyn::RigidBodyState{}, f, in)(0), 1.5);
}

TEST(Accelerations, RotorTorqueBalance) {
  dyn::ForceSet f;
  f.rotor_moment = 5e4;
  f.shaft_torque = 5e4;
  dyn::RigidBodyState s;
  s.rates(0) = 0.3;
  EXPECT_EQ(dyn::accelerations(s, f, dyn::default_inertia())(6), 0.0);
}

TEST(Accelerations, SolveResidual) {
  oct::Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto in = oct_test::random_inertia(rng);
    const auto s = oct_test::random_state(rng);
    const auto f = oct_test::random_forces(rng);
    const dyn::RigidBody body(in);
    const dyn::Vector6 a = body.accelerations(s, f).head<6>();
    const dyn::Vector6 F = dyn::assemble_forcing(s, f, in);
    ASSERT_LE((body.mass_matrix() * a - F).norm(), 1e-10 * F.norm());
  }
}

TEST(Accelerations, IllConditionedRejected) {
  dyn::InertiaSet in = oct_test::decoupled_inertia();
  in.I_y = 1e-13;
  EXPECT_THROW(dyn::RigidBody{in}, oct::NumericalError);
}

TEST(Integrate, EquilibriumPreserved) {
  const auto traj = dyn::integrate(
      dyn::RigidBodyState{}, [](const dyn::RigidBodyState&, double) { return dyn::ForceSet{}; },
      dyn::default_inertia(), 0.01, 100);
  ASSERT_EQ(traj.size(), 101u);
  EXPECT_EQ(traj.back().state.to_vector(), dyn::Vector14::Zero());
}

TEST(Integrate, ConstantSurgeForce) {
  const auto in = oct_test::decoupled_inertia(2.0, 1.0);
  const double fx = 3.0, dt = 1e-3;
  const auto traj = dyn::integrate(
      dyn::RigidBodyState{},
      [fx](const dyn::RigidBodyState&, double) {
        dyn::ForceSet f;
        f.forces(0) = fx;
        return f;
      },
      in, dt, 2000);
  const double t = traj.back().time;
  const double a = fx / in.m;
  EXPECT_NEAR(traj.back().state.velocity(0), a * t, 1e-6 * a * t);
  EXPECT_NEAR(traj.back().state.position(0), 0.5 * a * t * t, 1e-6 * 0.5 * a * t * t);
}

TEST(Integrate, FourthOrderOnOscillator) {
  const double e1 = oct_test::harmonic_error(0.05, 10.0);
  const double e2 = oct_test::harmonic_error(0.025, 10.0);
  const double order = std::log2(e1 / e2);
  EXPECT_GE(order, 3.8);
  EXPECT_LE(order, 4.2);
}

TEST(Integrate, AnglesWrapped) {
  dyn::RigidBodyState s;
  s.rotor_rate = 10.0;
  const auto traj = dyn::integrate(
      s, [](const dyn::RigidBodyState&, double) { return dyn::ForceSet{}; }, oct_test::decoupled_inertia(), 0.01,
      200);
  for (const auto& p : traj) {
    EXPECT_GT(p.state.rotor_angle, -std::numbers::pi);
    EXPECT_LE(p.state.rotor_angle, std::numbers::pi);
  }
  EXPECT_NEAR(dyn::wrap_angle(3.0 * std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(dyn::wrap_angle(-std::numbers::pi), std::numbers::pi, 1e-12);
}

TEST(Integrate, GimbalAbort) {
  dyn::RigidBodyState s;
  s.rates(1) = 1.0;  // pitching at 1 rad/s passes 85 deg in ~1.5 s
  EXPECT_THROW(dyn::integrate(
                   s, [](const dyn::RigidBodyState&, double) { return dyn::ForceSet{}; },
                   oct_test::decoupled_inertia(), 0.01, 300),
               oct::NumericalError);
}

TEST(Integrate, RejectsBadStep) {
  EXPECT_THROW(dyn::integrate(
                   dyn::RigidBodyState{}, [](const dyn::RigidBodyState&, double) { return dyn::ForceSet{}; },
                   dyn::default_inertia(), 0.0, 1),
               oct::InputError);
}

TEST(Kinematics, BodyToInertialIsRotation) {
  const auto R = dyn::RigidBody::body_to_inertial(0.1, -0.4, 2.0);
  EXPECT_NEAR((R * R.transpose() - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-14);
  EXPECT_NEAR(R.determinant(), 1.0, 1e-14);
  const auto Ry = dyn::RigidBody::body_to_inertial(0.0, 0.0, std::numbers::pi / 2);
  EXPECT_NEAR((Ry * Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitY()).norm(), 0.0, 1e-15);
}

TEST(Inertia, ParseKeepsDefaults) {
  const auto in = dyn::parse_inertia("m = 6e5\n# comment\nI_y = 3e7\n");
  EXPECT_EQ(in.m, 6e5);
  EXPECT_EQ(in.I_y, 3e7);
  EXPECT_EQ(in.m_r, dyn::default_inertia().m_r);
  EXPECT_THROW(dyn::parse_inertia("mass = 1\n"), oct::InputError);
  EXPECT_THROW(dyn::parse_inertia("m = -1\n"), oct::InputError);
}

TEST(Surrogate, NeutralAtTrim) {
  dyn::SurrogateEnvironment env;
  env.current_speed = 0.0;
  dyn::RigidBodyState s;
  s.position = env.tether_rest;
  const auto f = dyn::surrogate_force_model(s, {env.trim_fill, env.trim_fill, 0.0}, env);
  EXPECT_NEAR(f.forces.norm(), 0.0, 1e-9);
  EXPECT_NEAR(f.moments.norm(), 0.0, 1e-9);
}

TEST(Surrogate, MoreAirMoreLift) {
  dyn::SurrogateEnvironment env;
  dyn::RigidBodyState s;
  s.position = env.tether_rest;
  double prev = std::numeric_limits<double>::infinity();
  for (double b = 0.0; b <= 1.0; b += 0.1) {
    const double fz = dyn::surrogate_force_model(s, {b, b, 0.0}, env).forces(2);  // z is down
    EXPECT_LT(fz, prev);
    prev = fz;
  }
}

TEST(Surrogate, QuadraticDrag) {
  dyn::SurrogateEnvironment env;
  dyn::RigidBodyState s;
  s.position = env.tether_rest;
  const dyn::Controls u{env.trim_fill, env.trim_fill, 0.0};
  env.current_speed = 1.0;
  const double f1 = dyn::surrogate_force_model(s, u, env).forces(0);
  env.current_speed = 2.0;
  const double f2 = dyn::surrogate_force_model(s, u, env).forces(0);
  EXPECT_NEAR(f2 / f1, 4.0, 1e-12);
}

TEST(Linearize, RecoversAffineModel) {
  oct::Rng rng(8);
  oct_test::AffineForceModel model;
  for (int i = 0; i < model.K.size(); ++i) model.K.data()[i] = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < model.L.size(); ++i) model.L.data()[i] = rng.uniform(-1.0, 1.0);
  const auto lm = dyn::linearize(model, dyn::Vector13::Zero(), dyn::Vector3::Zero(), oct_test::decoupled_inertia());

  // Reduced order [u v w p_b p_r q r x y z phi theta psi]; unit body so
  // accelerations equal the loads.
  dyn::MatrixA A = dyn::MatrixA::Zero();
  dyn::MatrixB B = dyn::MatrixB::Zero();
  const int load_row[] = {0, 1, 2, 3, -1, 4, 5};
  for (int r = 0; r < 7; ++r) {
    if (load_row[r] < 0) continue;
    A.row(r) = model.K.row(load_row[r]);
    B.row(r) = model.L.row(load_row[r]);
  }
  A.block<3, 3>(7, 0).setIdentity();  // position from velocity
  A(10, 3) = 1.0;                     // phi from p_b
  A(11, 5) = 1.0;                     // theta from q
  A(12, 6) = 1.0;                     // psi from r
  EXPECT_LE((lm.A - A).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((lm.B - B).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(lm.equilibrium_residual, 0.0);
}

TEST(Linearize, NominalConditionAccepted) {
  dyn::SurrogateEnvironment env;
  const auto model = [&](const dyn::RigidBodyState& s, const dyn::Controls& u) {
    return dyn::surrogate_force_model(s, u, env);
  };
  const auto x_eq = dyn::nominal_state();
  EXPECT_EQ(x_eq(4), 1.49);
  EXPECT_EQ(x_eq(7), 554.50);
  EXPECT_EQ(x_eq(12), 3.14);
  const auto lm = dyn::linearize(model, x_eq, dyn::nominal_controls(), dyn::default_inertia());
  EXPECT_TRUE(lm.A.allFinite());
  EXPECT_TRUE(lm.B.allFinite());
  EXPECT_EQ(lm.u_eq(2), -188280.0);
  EXPECT_TRUE(std::isfinite(lm.equilibrium_residual));
}

TEST(Linearize, StepRobust) {
  dyn::SurrogateEnvironment env;
  const auto model = [&](const dyn::RigidBodyState& s, const dyn::Controls& u) {
    return dyn::surrogate_force_model(s, u, env);
  };
  const auto x = dyn::nominal_state();
  const auto u = dyn::nominal_controls();
  const auto base = dyn::linearize(model, x, u, dyn::default_inertia(), 1e-5);
  for (double step : {2e-5, 5e-6}) {
    const auto other = dyn::linearize(model, x, u, dyn::default_inertia(), step);
    EXPECT_LE((other.A - base.A).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((other.B - base.B).cwiseAbs().maxCoeff(), 1e-6);
  }
}

}  // namespace
