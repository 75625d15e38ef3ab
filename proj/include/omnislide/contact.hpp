#pragma once

#include "omnislide/core.hpp"

#include <string>

namespace omnislide {

/// Lumped contact at the end-effector tip, expressed in {E}: Z_E is the
/// surface normal (into the surface), X_E/Y_E span the sliding plane.
struct ContactState {
  Vec3 f_N = Vec3::Zero();  // surface reaction on the EE, along -Z_E
  Vec3 f_R = Vec3::Zero();  // rolling resistance, opposes motion
  Vec3 f_w = Vec3::Zero();  // wheel driving friction, along motion
  double tau_w = 0.0;       // total wheel motor torque magnitude, N*m
  bool in_contact = true;
  bool slipping = false;
};

struct ConditionResult {
  bool pass = false;
  double margin = 0.0;  // bound - demand, in the bound's units
  std::string binding;  // expression that set the bound
};

struct ConditionReport {
  ConditionResult friction_ratio;   // mu_S / mu_R >= dominance ratio
  ConditionResult rolling_overcome; // mu_R |f_N| < |f_w|
  ConditionResult no_slip;          // |f_w| <= min(eta tau_max / R_w, mu_S |f_N|)
  ConditionResult wheel_load;       // C_wheel g / |f_N| >= dominance ratio

  bool all_pass() const {
    return friction_ratio.pass && rolling_overcome.pass && no_slip.pass && wheel_load.pass;
  }
};

/// Magnitude mu_R * f_N opposing `direction_of_motion`; zero at rest.
/// Throws std::invalid_argument for negative or non-finite f_N.
Vec3 rolling_resistance(double f_N_mag, const Vec2& direction_of_motion, const ParameterSet& params);

/// Magnitude tau_w / R_w along `direction`. Throws for negative torque, or a
/// positive torque with no direction.
Vec3 driving_force_from_torque(double tau_w, const Vec2& direction, const ParameterSet& params);

/// Motor-side bound eta * tau_w_max / R_w on the driving force.
double motor_force_bound(const ParameterSet& params);

/// Builds a consistent state: rolling resistance from `velocity`, driving
/// force `f_w_mag` along the motion, torque f_w_mag * R_w.
ContactState make_contact_state(double f_N_mag, double f_w_mag, const Vec2& velocity, const ParameterSet& params);

ConditionReport check_contact_conditions(const ContactState& state, const ParameterSet& params);

}  // namespace omnislide
