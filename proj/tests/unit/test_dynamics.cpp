#include "omnislide/dynamics.hpp"
#include "omnislide/frames.hpp"

#include "../support/oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace omnislide;
using omnislide::fixtures::oracle_value;

namespace {

GeneralizedState bare_state(double mass, const Vec3& a) {
  GeneralizedState s;
  s.mass = mass;
  s.a_lin = a;
  return s;
}

}  // namespace

TEST(LeverArm, ShortenedByWheelRadius) {
  const Vec3 l_w = lever_arm_lw(Vec3{0.5, 0.0, 0.0}, 0.024);
  EXPECT_NEAR(l_w.x(), oracle_value("envelope", "l_w"), 1e-15);
  EXPECT_EQ(l_w.y(), 0.0);
  EXPECT_EQ(lever_arm_lw(Vec3{0.0, 0.0, 1.0}, 0.0), Vec3(0.0, 0.0, 1.0));
  EXPECT_THROW(lever_arm_lw(Vec3{0.024, 0.0, 0.0}, 0.024), std::invalid_argument);
  EXPECT_NEAR(lever_arm_lw(ParameterSet::defaults()).norm(), 0.476, 1e-15);
}

TEST(RequiredDrivingForce, AcceleratingAgainstRollingResistance) {
  const Vec3 f_w = required_driving_force(bare_state(4.4, {0.02, 0.0, 0.0}), {-0.3, 0.0, 0.0});
  EXPECT_NEAR(f_w.x(), oracle_value("dynamics", "f_w_accel"), 1e-12);
  EXPECT_EQ(f_w.y(), 0.0);
}

TEST(RequiredDrivingForce, CoastingAndSteadySliding) {
  EXPECT_EQ(required_driving_force(bare_state(4.4, Vec3::Zero()), Vec3::Zero()), Vec3::Zero());
  const Vec3 steady = required_driving_force(bare_state(4.4, Vec3::Zero()), {-0.3, 0.0, 0.0});
  EXPECT_NEAR(steady.x(), 0.3, 1e-15);
}

TEST(RequiredDrivingForce, AffineInAcceleration) {
  const Vec3 a{0.0, 0.013, -0.007};
  const Vec3 once = required_driving_force(bare_state(4.4, a), Vec3::Zero());
  const Vec3 twice = required_driving_force(bare_state(4.4, 2 * a), Vec3::Zero());
  EXPECT_EQ(twice, 2 * once);
}

TEST(RequiredAttitudeTorque, StaticBalanceIsZero) {
  EXPECT_EQ(required_attitude_torque(bare_state(4.4, Vec3::Zero()), ParameterSet::defaults()), Vec3::Zero());
}

TEST(RequiredAttitudeTorque, CrossProductMagnitude) {
  auto p = ParameterSet::defaults();
  p.l_C = Vec3{0.5, 0.0, 0.0};
  const Vec3 tau = required_attitude_torque(bare_state(4.4, {0.0, 0.02, 0.0}), p);
  EXPECT_NEAR(tau.norm(), oracle_value("dynamics", "tau_a_mag"), 1e-12);
  EXPECT_NEAR(tau.norm(), 0.0419, 5e-5);
}

TEST(RequiredAttitudeTorque, DisturbanceNeverExceedsTriangleBound) {
  const auto p = ParameterSet::defaults();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    auto s = bare_state(4.4, {0.0, d(rng), d(rng)});
    s.h_lin = Vec3{d(rng), d(rng), d(rng)};
    EXPECT_LE(disturbance_torque(s, p).norm(), disturbance_torque_bound(s, p) + 1e-12);
  }
}

TEST(FullBalance, ClosesWithoutRollingResistance) {
  const auto p = ParameterSet::defaults();
  // At rest but accelerating: no rolling resistance, so the lever-arm
  // approximation is exact.
  const auto w = solve_sliding_wrench({0.0, 0.0}, {0.02, -0.01}, 10.0, p);
  const Vec3 tau_a = required_attitude_torque(w.state, p);
  const auto r = full_balance_residual(w.state, w.contact, w.thrust, tau_a, p);
  EXPECT_LE(r.linear, 1e-9);
  EXPECT_LE(r.angular, 1e-9);
}

TEST(FullBalance, ExactTorqueClosesWhileSliding) {
  const auto p = ParameterSet::defaults();
  const auto w = solve_sliding_wrench({0.01, 0.0}, {0.02, 0.0}, 10.0, p);
  EXPECT_LE(w.residual.linear, 1e-9);
  EXPECT_LE(w.residual.angular, 1e-9);
}

TEST(FullBalance, ApproximateTorqueErrorIsRollingResistanceTimesRadius) {
  const auto p = ParameterSet::defaults();
  const auto w = solve_sliding_wrench({0.01, 0.0}, {0.02, 0.0}, 10.0, p);
  const Vec3 approx = required_attitude_torque(w.state, p);
  const auto r = full_balance_residual(w.state, w.contact, w.thrust, approx, p);
  const double bound = oracle_value("envelope", "f_R_times_R_w");
  EXPECT_NEAR(r.angular, bound, 1e-12);
  EXPECT_LT(bound, 0.01 * p.Gamma_max);
}

TEST(FullBalance, ThrustPerturbationShowsUpLinearly) {
  const auto p = ParameterSet::defaults();
  const auto w = solve_sliding_wrench({0.004, 0.006}, {0.01, 0.0}, 12.0, p);
  const auto r = full_balance_residual(w.state, w.contact, w.thrust + Vec3{1.0, 0.0, 0.0}, w.attitude_torque, p);
  EXPECT_NEAR(r.linear, 1.0, 1e-12);
  EXPECT_LE(r.angular, 1e-9);
}

TEST(FullBalance, NormalForceThroughCoMAddsNoTorque) {
  auto p = ParameterSet::defaults();
  const auto w = solve_sliding_wrench({0.0, 0.0}, {0.0, 0.0}, 15.0, p);
  ContactState pressed = w.contact;
  pressed.f_N = Vec3{0.0, 0.0, -25.0};
  // Thrust rebalanced for the larger push; the angular balance is untouched.
  const Vec3 thrust = required_thrust(w.state, ee_to_body_rotation() * pressed.f_N);
  const auto r = full_balance_residual(w.state, pressed, thrust, w.attitude_torque, p);
  EXPECT_LE(r.linear, 1e-9);
  EXPECT_LE(r.angular, 1e-12);

  // A tilted boom no longer passes f_N through the CoM.
  p.l_C = Vec3{-0.5, 0.1, 0.0};
  const auto tilted = full_balance_residual(w.state, pressed, thrust, w.attitude_torque, p);
  EXPECT_GT(tilted.angular, 1.0);
}

TEST(SlidingState, BodyFrameLayout) {
  const auto p = ParameterSet::defaults();
  const auto s = sliding_state({0.01, -0.002}, {0.0, 0.02}, p);
  EXPECT_EQ(s.v_lin.x(), 0.0);
  EXPECT_EQ(s.v_ang, Vec3::Zero());
  EXPECT_EQ(s.v_lin.y(), 0.01);
  EXPECT_EQ(s.a_lin.z(), 0.02);
  EXPECT_NEAR(s.g_lin.z(), p.system_mass * kGravity, 1e-12);
  EXPECT_EQ(s.g_ang, Vec3::Zero());
}
