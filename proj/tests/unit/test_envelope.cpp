#include "omnislide/envelope.hpp"
#include "omnislide/params_json.hpp"

#include "../support/oracle.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace omnislide;
using omnislide::fixtures::oracle_value;

TEST(EvaluateConstraints, ReferenceOperatingPoint) {
  const auto p = ParameterSet::defaults();
  const auto r = evaluate_constraints(10.0, {0.01, 0.0}, {0.02, 0.0}, p);
  EXPECT_TRUE(r.feasible());
  EXPECT_NEAR(r.cond_b.demand, oracle_value("envelope", "demand_b"), 1e-12);
  EXPECT_NEAR(r.cond_b.bound, oracle_value("envelope", "bound_b"), 1e-12);
  EXPECT_NEAR(r.cond_b.margin, oracle_value("envelope", "margin_b"), 1e-12);
  EXPECT_TRUE(r.slip_bound_binding());
  EXPECT_NEAR(r.cond_c.margin, oracle_value("envelope", "margin_c"), 1e-12);
  EXPECT_NEAR(r.cond_d.demand, oracle_value("envelope", "demand_d"), 1e-12);
  EXPECT_NEAR(r.cond_d.margin, oracle_value("envelope", "margin_d"), 1e-12);
  EXPECT_NEAR(r.cond_a.bound, oracle_value("envelope", "ratio_a"), 1e-12);
  EXPECT_NEAR(r.cond_a.margin, oracle_value("envelope", "margin_a"), 1e-12);
}

TEST(EvaluateConstraints, ForceAboveCeilingFailsOnlyC) {
  const auto r = evaluate_constraints(30.0, {0.01, 0.0}, {0.02, 0.0}, ParameterSet::defaults());
  EXPECT_FALSE(r.cond_c.pass);
  EXPECT_TRUE(r.cond_a.pass);
  EXPECT_TRUE(r.cond_b.pass);
  EXPECT_TRUE(r.cond_d.pass);
  EXPECT_FALSE(r.feasible());
}

TEST(EvaluateConstraints, LargeAccelerationFailsD) {
  const auto p = ParameterSet::defaults();
  const double flip = oracle_value("envelope", "a_flip_d");
  EXPECT_TRUE(evaluate_constraints(10.0, {0.01, 0.0}, {flip * 0.999, 0.0}, p).cond_d.pass);
  EXPECT_FALSE(evaluate_constraints(10.0, {0.01, 0.0}, {flip * 1.001, 0.0}, p).cond_d.pass);
}

TEST(EvaluateConstraints, MarginSignMatchesPass) {
  const auto p = ParameterSet::defaults();
  for (double f = 0.0; f <= 40.0; f += 0.5) {
    for (double a : {0.0, 0.02, 0.5, 1.5}) {
      const auto r = evaluate_constraints(f, {0.01, 0.0}, {a, 0.0}, p);
      for (const auto* c : {&r.cond_a, &r.cond_b, &r.cond_c, &r.cond_d}) {
        EXPECT_EQ(c->pass, c->margin >= 0);
      }
      EXPECT_EQ(r.feasible(), r.cond_a.pass && r.cond_b.pass && r.cond_c.pass && r.cond_d.pass);
    }
  }
}

TEST(EvaluateConstraints, NonzeroCoriolisTermAddsToDemands) {
  const auto p = ParameterSet::defaults();
  const auto base = evaluate_constraints(10.0, {0.01, 0.0}, {0.02, 0.0}, p);
  const auto with_h = evaluate_constraints(10.0, {0.01, 0.0}, {0.02, 0.0}, p, {0.1, 0.0});
  EXPECT_NEAR(with_h.cond_b.demand - base.cond_b.demand, 0.1, 1e-12);
  EXPECT_NEAR(with_h.cond_d.demand - base.cond_d.demand, 0.1 * 0.476, 1e-12);
}

TEST(FeasibleInterval, ReproducesLoadTestInterval) {
  const auto p = ParameterSet::defaults();
  const auto fi = feasible_force_interval(p.v_max, p.a_max, p, 15.0);
  EXPECT_FALSE(fi.empty);
  EXPECT_DOUBLE_EQ(fi.f_low, 10.0);
  EXPECT_DOUBLE_EQ(fi.f_up, 15.0);
  ASSERT_TRUE(fi.analytic_b_bound);
  // Motor-side bound of (b): (31.25 - 0.088) / 0.03.
  EXPECT_NEAR(*fi.analytic_b_bound, (31.25 - 0.088) / 0.03, kBisectionResolution);
}

TEST(FeasibleInterval, InvertedBoundsAreEmpty) {
  const auto p = ParameterSet::defaults();
  const auto fi = feasible_force_interval(p.v_max, p.a_max, p, 8.0);
  EXPECT_TRUE(fi.empty);
  EXPECT_GT(fi.f_low, fi.f_up);
}

TEST(FeasibleInterval, ForceCeilingBindsWithoutHardwareCap) {
  const auto p = ParameterSet::defaults();
  const auto fi = feasible_force_interval(p.v_max, p.a_max, p);
  EXPECT_FALSE(fi.empty);
  EXPECT_DOUBLE_EQ(fi.f_low, 10.0);
  EXPECT_DOUBLE_EQ(fi.f_up, 25.0);
}

TEST(FeasibleInterval, TractionLimitedFloorIsBisected) {
  auto p = ParameterSet::defaults();
  p.system_mass = 200.0;
  p.Gamma_max = 1000.0;
  // (b) needs mu_S f >= 200*0.02 + 0.03 f  ->  f >= 4 / 0.32 = 12.5 N. Feasible set [12.5, 25].
  const auto fi = feasible_force_interval(p.v_max, p.a_max, p);
  EXPECT_DOUBLE_EQ(fi.f_up, 25.0);
  // Heavy enough that nothing up to f_max is feasible.
  p.system_mass = 2000.0;
  const auto none = feasible_force_interval(p.v_max, p.a_max, p);
  EXPECT_FALSE(none.constraint_sup);
  EXPECT_TRUE(none.empty);
}

TEST(FeasibleInterval, MotorBoundCapsBelowForceCeiling) {
  auto p = ParameterSet::defaults();
  p.tau_w_max = 0.03;  // motor bound 0.625 N -> (b) holds while 0.088 + 0.03 f <= 0.625
  const auto fi = feasible_force_interval(p.v_max, p.a_max, p);
  const double expected = (0.625 - 0.088) / 0.03;
  EXPECT_LE(fi.f_up, expected);
  EXPECT_GE(fi.f_up, expected - kBisectionResolution);
  EXPECT_TRUE(evaluate_constraints(fi.f_up, {p.v_max, 0.0}, {p.a_max, 0.0}, p).feasible());
}

TEST(Sweep, NormalForceFlipsC) {
  const auto p = ParameterSet::defaults();
  const auto rows = sweep(p, SweepAxis::NormalForce, 5.0, 30.0, 26, OperatingPoint::from_params(p));
  ASSERT_EQ(rows.size(), 26u);
  for (const auto& row : rows) EXPECT_EQ(row.report.cond_c.pass, row.value <= 25.0) << row.value;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].value, rows[i - 1].value);
    EXPECT_LT(rows[i].report.cond_c.margin, rows[i - 1].report.cond_c.margin);
    EXPECT_GE(rows[i].report.cond_b.margin, rows[i - 1].report.cond_b.margin);
  }
  const auto flip = find_threshold(p, SweepAxis::NormalForce, 5.0, 30.0, 'c', OperatingPoint::from_params(p),
                                   kBisectionResolution);
  ASSERT_TRUE(flip);
  EXPECT_NEAR(*flip, 25.0, kBisectionResolution);
}

TEST(Sweep, AccelerationFlipsD) {
  const auto p = ParameterSet::defaults();
  const auto flip =
      find_threshold(p, SweepAxis::Acceleration, 0.0, 1.2, 'd', OperatingPoint::from_params(p), 1e-4);
  ASSERT_TRUE(flip);
  EXPECT_NEAR(*flip, oracle_value("envelope", "a_flip_d"), 1e-3);
}

TEST(Sweep, StaticFrictionFlipsB) {
  const auto p = ParameterSet::defaults();
  const auto flip =
      find_threshold(p, SweepAxis::StaticFriction, 0.02, 0.5, 'b', OperatingPoint::from_params(p), 1e-6);
  ASSERT_TRUE(flip);
  EXPECT_NEAR(*flip, oracle_value("envelope", "mu_s_flip_b"), 1e-5);
  const auto rows = sweep(p, SweepAxis::StaticFriction, 0.05, 0.5, 10, OperatingPoint::from_params(p));
  for (const auto& row : rows) EXPECT_TRUE(row.report.cond_b.pass);
}

TEST(Sweep, MassAxisAndErrors) {
  const auto p = ParameterSet::defaults();
  const auto rows = sweep(p, SweepAxis::Mass, 1.0, 300.0, 5, OperatingPoint::from_params(p));
  EXPECT_TRUE(rows.front().report.feasible());
  EXPECT_FALSE(rows.back().report.cond_b.pass);
  EXPECT_THROW(sweep(p, SweepAxis::Mass, 2.0, 1.0, 5, OperatingPoint::from_params(p)), std::invalid_argument);
  EXPECT_THROW(sweep(p, SweepAxis::Mass, 1.0, 2.0, 0, OperatingPoint::from_params(p)), std::invalid_argument);
  EXPECT_THROW(parse_sweep_axis("velocity"), std::invalid_argument);
  EXPECT_EQ(parse_sweep_axis("mu_S"), SweepAxis::StaticFriction);
}

TEST(Sweep, StaticContactFeasibleAcrossRange) {
  const auto p = ParameterSet::defaults();
  for (double f = p.f_min_contact; f <= p.f_max; f += 0.1) {
    EXPECT_TRUE(evaluate_constraints(f, {0.0, 0.0}, {0.0, 0.0}, p).feasible()) << f;
  }
}

TEST(SweepCsv, MatchesGoldenFile) {
  const auto p = ParameterSet::defaults();
  const auto rows = sweep(p, SweepAxis::NormalForce, 5.0, 30.0, 6, OperatingPoint::from_params(p));
  std::ostringstream os;
  write_sweep_csv(os, SweepAxis::NormalForce, rows);
  std::ifstream golden(std::string(OMNISLIDE_FIXTURE_DIR) + "/sweep_f_N_golden.csv");
  ASSERT_TRUE(golden) << "missing golden file";
  std::stringstream expected;
  expected << golden.rdbuf();
  EXPECT_EQ(os.str(), expected.str());
}
