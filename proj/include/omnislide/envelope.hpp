#pragma once

// System constraint set for active sliding and the feasible normal-force interval.
//
//   (a) mu_S / mu_R >= dominance ratio
//   (b) |M_lin a + h_lin - f_R| <= min(eta tau_w_max / R_w, mu_S |f_N|)
//   (c) |f_N| <= f_max
//   (d) (|M_lin a| + |h_lin|) |l_w| <= Gamma_max

#include "omnislide/core.hpp"
#include "omnislide/kinematics.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace omnislide {

struct ConstraintCheck {
  bool pass = false;
  double demand = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - demand; pass <=> margin >= 0
  std::string binding;
};

struct ConstraintReport {
  ConstraintCheck cond_a;
  ConstraintCheck cond_b;
  ConstraintCheck cond_c;
  ConstraintCheck cond_d;

  bool feasible() const { return cond_a.pass && cond_b.pass && cond_c.pass && cond_d.pass; }
  /// True when (b) is bounded by traction rather than motor torque.
  bool slip_bound_binding() const;
};

/// Evaluates (a)-(d) at one operating point. `acceleration` and `h_lin` live in
/// the sliding plane; rolling resistance opposes `velocity`.
ConstraintReport evaluate_constraints(double f_N_mag, const EEVelocity& velocity, const Vec2& acceleration,
                                      const ParameterSet& params, const Vec2& h_lin = Vec2::Zero());

struct FeasibleInterval {
  double f_low = 0.0;
  double f_up = 0.0;
  bool empty = true;
  /// Largest |f_N| satisfying (a)-(d) at the evaluation point; nullopt if none does.
  std::optional<double> constraint_sup;
  /// Largest |f_N| satisfying (b) alone (motor/traction bound), for comparison
  /// with the load-test cap. +inf when (b) never caps from above.
  std::optional<double> analytic_b_bound;
};

inline constexpr double kBisectionResolution = 0.01;  // N

/// f_low = f_min_contact; f_up = min(hardware_cap, f_max, sup of feasible |f_N|).
/// Constraints are evaluated at speed v_max with a_max along the direction of
/// motion, the worst case for (b). The supremum is bisected to 0.01 N.
FeasibleInterval feasible_force_interval(double v_max, double a_max, const ParameterSet& params,
                                         double hardware_cap = std::numeric_limits<double>::infinity());

enum class SweepAxis { NormalForce, Acceleration, StaticFriction, Mass };

const char* to_string(SweepAxis axis);
/// Accepts "f_N", "a", "mu_S", "mass"; throws std::invalid_argument otherwise.
SweepAxis parse_sweep_axis(const std::string& name);

/// Operating point around which a sweep varies one axis.
struct OperatingPoint {
  double f_N = 10.0;
  EEVelocity velocity{0.01, 0.0};
  Vec2 acceleration{0.02, 0.0};

  /// f_reference, (v_max, 0) and (a_max, 0) from the parameter set.
  static OperatingPoint from_params(const ParameterSet& params);
};

struct SweepRow {
  double value = 0.0;
  ConstraintReport report;
};

/// `samples` evenly spaced values over [lo, hi] (hi included). The acceleration
/// axis scales |a| along the operating point's acceleration direction (X_E if zero).
/// Throws std::invalid_argument for samples == 0, lo > hi or non-finite bounds.
std::vector<SweepRow> sweep(const ParameterSet& params, SweepAxis axis, double lo, double hi, std::size_t samples,
                            const OperatingPoint& base);

/// Bisects [lo, hi] for the axis value where condition `which` ('a'..'d')
/// changes pass state, to within `resolution`. nullopt if both ends agree.
std::optional<double> find_threshold(const ParameterSet& params, SweepAxis axis, double lo, double hi, char which,
                                     const OperatingPoint& base, double resolution);

/// CSV: header row, then one row per sample. Column order is stable:
/// <axis>,feasible,pass_a,margin_a,pass_b,demand_b,bound_b,margin_b,binding_b,pass_c,margin_c,pass_d,demand_d,margin_d
void write_sweep_csv(std::ostream& os, SweepAxis axis, const std::vector<SweepRow>& rows);

}  // namespace omnislide
