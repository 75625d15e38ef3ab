#include "omnislide/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace omnislide {
namespace {

Vec3 in_plane(const Vec2& v) { return {v.x(), v.y(), 0.0}; }

Vec2 unit_or_zero(const Vec2& v) {
  const double n = v.norm();
  return n > 0 ? Vec2(v / n) : Vec2::Zero();
}

}  // namespace

Vec3 rolling_resistance(double f_N_mag, const Vec2& direction_of_motion, const ParameterSet& params) {
  if (!std::isfinite(f_N_mag) || f_N_mag < 0) {
    throw std::invalid_argument("rolling_resistance: normal force must be finite and non-negative");
  }
  if (!all_finite(direction_of_motion)) throw std::invalid_argument("rolling_resistance: non-finite direction");
  return -params.mu_rolling * f_N_mag * in_plane(unit_or_zero(direction_of_motion));
}

Vec3 driving_force_from_torque(double tau_w, const Vec2& direction, const ParameterSet& params) {
  if (!std::isfinite(tau_w) || tau_w < 0) {
    throw std::invalid_argument("driving_force_from_torque: torque must be finite and non-negative");
  }
  if (tau_w == 0) return Vec3::Zero();
  const Vec2 unit = unit_or_zero(direction);
  if (unit.isZero()) throw std::invalid_argument("driving_force_from_torque: torque without a direction");
  return (tau_w / params.wheel_radius) * in_plane(unit);
}

double motor_force_bound(const ParameterSet& params) {
  return params.safety_factor * params.tau_w_max / params.wheel_radius;
}

ContactState make_contact_state(double f_N_mag, double f_w_mag, const Vec2& velocity, const ParameterSet& params) {
  ContactState s;
  s.f_N = Vec3{0.0, 0.0, -f_N_mag};
  s.f_R = rolling_resistance(f_N_mag, velocity, params);
  s.tau_w = f_w_mag * params.wheel_radius;
  s.f_w = f_w_mag * in_plane(unit_or_zero(velocity));
  s.in_contact = f_N_mag > 0;
  return s;
}

ConditionReport check_contact_conditions(const ContactState& state, const ParameterSet& params) {
  ConditionReport report;
  const double f_N = state.f_N.norm();
  const double f_w = state.f_w.norm();
  const double ratio_min = params.dominance_ratio;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  const double mu_ratio = params.mu_rolling > 0 ? params.mu_static / params.mu_rolling : kInf;
  report.friction_ratio = {mu_ratio >= ratio_min, mu_ratio - ratio_min, "mu_S/mu_R"};

  const double rolling = params.mu_rolling * f_N;
  report.rolling_overcome = {rolling < f_w, f_w - rolling, "mu_R*|f_N|"};

  const double motor = motor_force_bound(params);
  const double traction = params.mu_static * f_N;
  const double upper = std::min(motor, traction);
  report.no_slip = {f_w <= upper, upper - f_w, traction <= motor ? "mu_S*|f_N|" : "eta*tau_w_max/R_w"};

  const double load_ratio = f_N > 0 ? params.wheel_load_capacity * kGravity / f_N : kInf;
  report.wheel_load = {load_ratio >= ratio_min, load_ratio - ratio_min, "C_wheel*g/|f_N|"};
  return report;
}

}  // namespace omnislide
