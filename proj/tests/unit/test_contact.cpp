#include "omnislide/contact.hpp"

#include "../support/oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace omnislide;
using omnislide::fixtures::oracle_value;

TEST(RollingResistance, OpposesMotion) {
  const auto p = ParameterSet::defaults();
  const Vec3 f = rolling_resistance(10.0, {1.0, 0.0}, p);
  EXPECT_NEAR(f.x(), oracle_value("contact", "f_R_10N_x"), 1e-12);
  EXPECT_EQ(f.y(), 0.0);
  EXPECT_EQ(f.z(), 0.0);
}

TEST(RollingResistance, ZeroAtRest) {
  EXPECT_EQ(rolling_resistance(10.0, {0.0, 0.0}, ParameterSet::defaults()), Vec3::Zero());
}

TEST(RollingResistance, AlongY) {
  auto p = ParameterSet::defaults();
  p.mu_rolling = 0.02;
  const Vec3 f = rolling_resistance(15.0, {0.0, 1.0}, p);
  EXPECT_NEAR(f.y(), oracle_value("contact", "f_R_15N_y_mu002"), 1e-12);
  EXPECT_EQ(f.x(), 0.0);
}

TEST(RollingResistance, RejectsNegativeNormalForce) {
  EXPECT_THROW(rolling_resistance(-1.0, {1.0, 0.0}, ParameterSet::defaults()), std::invalid_argument);
}

TEST(DrivingForce, FromTorque) {
  const auto p = ParameterSet::defaults();
  EXPECT_NEAR(driving_force_from_torque(0.06, {1.0, 0.0}, p).norm(), oracle_value("contact", "f_w_from_0p06"), 1e-12);
  EXPECT_EQ(driving_force_from_torque(0.0, {1.0, 0.0}, p), Vec3::Zero());
  EXPECT_NEAR(driving_force_from_torque(1.5, {0.0, -1.0}, p).y(), -oracle_value("contact", "f_w_from_stall"), 1e-12);
  EXPECT_THROW(driving_force_from_torque(-0.1, {1.0, 0.0}, p), std::invalid_argument);
  EXPECT_THROW(driving_force_from_torque(0.1, {0.0, 0.0}, p), std::invalid_argument);
}

TEST(ContactConditions, OperatingPointPasses) {
  const auto p = ParameterSet::defaults();
  const auto state = make_contact_state(10.0, 2.5, {0.01, 0.0}, p);
  const auto r = check_contact_conditions(state, p);
  EXPECT_TRUE(r.all_pass());
  EXPECT_EQ(r.no_slip.binding, "mu_S*|f_N|");
  EXPECT_NEAR(r.no_slip.margin, oracle_value("contact", "upper_bound_10N") - 2.5, 1e-12);
  EXPECT_NEAR(r.rolling_overcome.margin, 2.5 - oracle_value("contact", "rolling_10N"), 1e-12);
  EXPECT_NEAR(r.wheel_load.margin, oracle_value("contact", "wheel_load_ratio_10N") - 5.0, 1e-12);
  EXPECT_NEAR(motor_force_bound(p), oracle_value("contact", "motor_bound"), 1e-12);
  // f_w and f_R antiparallel, both in the plane; f_N normal.
  EXPECT_LT(state.f_w.dot(state.f_R), 0.0);
  EXPECT_NEAR(state.f_w.normalized().dot(-state.f_R.normalized()), 1.0, 1e-15);
  EXPECT_EQ(state.f_w.z(), 0.0);
  EXPECT_EQ(state.f_N.head<2>(), Vec2::Zero());
  EXPECT_NEAR(state.f_R.norm(), p.mu_rolling * state.f_N.norm(), 1e-15);
}

TEST(ContactConditions, DrivingForceBelowRollingResistanceFails) {
  const auto p = ParameterSet::defaults();
  const auto r = check_contact_conditions(make_contact_state(10.0, 0.2, {0.01, 0.0}, p), p);
  EXPECT_FALSE(r.rolling_overcome.pass);
  EXPECT_TRUE(r.no_slip.pass);
  EXPECT_NEAR(r.rolling_overcome.margin, -0.1, 1e-12);
}

TEST(ContactConditions, DrivingForceAboveTractionSlips) {
  const auto p = ParameterSet::defaults();
  const auto r = check_contact_conditions(make_contact_state(10.0, 4.0, {0.01, 0.0}, p), p);
  EXPECT_FALSE(r.no_slip.pass);
  EXPECT_TRUE(r.rolling_overcome.pass);
  EXPECT_NEAR(r.no_slip.margin, -0.5, 1e-12);
}

TEST(ContactConditions, WeakFrictionRatioFails) {
  auto p = ParameterSet::defaults();
  p.mu_rolling = 0.1;
  p.mu_static = 0.3;
  const auto r = check_contact_conditions(make_contact_state(10.0, 2.0, {0.01, 0.0}, p), p);
  EXPECT_FALSE(r.friction_ratio.pass);
}

TEST(ContactProperties, ExceedingTractionFlipsOnlyTheSlipCondition) {
  const auto p = ParameterSet::defaults();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> fn(10.0, 15.0);
  for (int k = 0; k < 200; ++k) {
    const double f_N = fn(rng);
    const double traction = p.mu_static * f_N;
    std::uniform_real_distribution<double> fw(p.mu_rolling * f_N * 1.01, traction);
    const auto pass = check_contact_conditions(make_contact_state(f_N, fw(rng), {0.0, 0.01}, p), p);
    ASSERT_TRUE(pass.all_pass());
    const auto fail = check_contact_conditions(make_contact_state(f_N, traction * 1.001, {0.0, 0.01}, p), p);
    EXPECT_FALSE(fail.no_slip.pass);
    EXPECT_TRUE(fail.friction_ratio.pass);
    EXPECT_TRUE(fail.rolling_overcome.pass);
    EXPECT_TRUE(fail.wheel_load.pass);
  }
}

TEST(ContactProperties, MarginsAreContinuous) {
  const auto p = ParameterSet::defaults();
  const double eps = 1e-7;
  const auto a = check_contact_conditions(make_contact_state(12.0, 2.0, {0.01, 0.0}, p), p);
  const auto b = check_contact_conditions(make_contact_state(12.0 + eps, 2.0 + eps, {0.01, 0.0}, p), p);
  EXPECT_LE(std::abs(a.no_slip.margin - b.no_slip.margin), 10 * eps);
  EXPECT_LE(std::abs(a.rolling_overcome.margin - b.rolling_overcome.margin), 10 * eps);
  EXPECT_LE(std::abs(a.wheel_load.margin - b.wheel_load.margin), 10 * eps);
}

TEST(ContactProperties, TractionBindsAcrossOperatingInterval) {
  const auto p = ParameterSet::defaults();
  for (double f_N = 10.0; f_N <= 15.0; f_N += 0.25) {
    EXPECT_LT(p.mu_static * f_N, motor_force_bound(p));
    const auto r = check_contact_conditions(make_contact_state(f_N, 1.0, {0.01, 0.0}, p), p);
    EXPECT_EQ(r.no_slip.binding, "mu_S*|f_N|");
  }
}
