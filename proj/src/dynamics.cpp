#include "omnislide/dynamics.hpp"

#include "omnislide/frames.hpp"

#include <cmath>
#include <stdexcept>

namespace omnislide {

GeneralizedState sliding_state(const Vec2& velocity, const Vec2& acceleration, const ParameterSet& params) {
  GeneralizedState s;
  s.v_lin = plane_to_body(velocity);
  s.a_lin = plane_to_body(acceleration);
  s.mass = params.system_mass;
  s.g_lin = -params.system_mass * params.gravity_body;
  s.g_ang = params.com_offset.cross(s.g_lin);
  return s;
}

Vec3 lever_arm_lw(const Vec3& l_C, double wheel_radius) {
  const double length = l_C.norm();
  if (wheel_radius == 0.0 && length > 0) return l_C;
  if (!(length > wheel_radius)) throw std::invalid_argument("lever_arm_lw: |l_C| must exceed R_w");
  return l_C / length * (length - wheel_radius);
}

Vec3 lever_arm_lw(const ParameterSet& params) { return lever_arm_lw(params.l_C, params.wheel_radius); }

Vec3 required_driving_force(const GeneralizedState& state, const Vec3& f_R) {
  return state.mass * state.a_lin + state.h_lin - f_R;
}

Vec3 disturbance_torque(const GeneralizedState& state, const ParameterSet& params) {
  return (state.mass * state.a_lin + state.h_lin).cross(lever_arm_lw(params));
}

double disturbance_torque_bound(const GeneralizedState& state, const ParameterSet& params) {
  return ((state.mass * state.a_lin).norm() + state.h_lin.norm()) * lever_arm_lw(params).norm();
}

Vec3 required_attitude_torque(const GeneralizedState& state, const ParameterSet& params) {
  return state.g_ang - disturbance_torque(state, params);
}

Vec3 exact_attitude_torque(const GeneralizedState& state, const Vec3& f_w, const Vec3& f_R,
                           const ParameterSet& params) {
  return state.g_ang - f_w.cross(lever_arm_lw(params)) - f_R.cross(params.l_C);
}

Vec3 required_thrust(const GeneralizedState& state, const Vec3& f_N) { return state.g_lin - f_N; }

BalanceResidual full_balance_residual(const GeneralizedState& state, const ContactState& contact, const Vec3& T_a,
                                      const Vec3& tau_a, const ParameterSet& params) {
  const Eigen::Matrix3d to_body = ee_to_body_rotation();
  const Vec3 f_N = to_body * contact.f_N;
  const Vec3 f_R = to_body * contact.f_R;
  const Vec3 f_w = to_body * contact.f_w;
  const Vec3 l_w = lever_arm_lw(params);

  const Vec3 lin = state.mass * state.a_lin + state.h_lin + state.g_lin - (T_a + f_w + f_R + f_N);
  // v_ang = 0 and dv_ang/dt = 0 during sliding, so M_ang and h_ang drop out.
  const Vec3 ang = state.g_ang - (tau_a + f_w.cross(l_w) + f_R.cross(params.l_C) + f_N.cross(params.l_C));
  return {lin.norm(), ang.norm()};
}

SlidingWrench solve_sliding_wrench(const Vec2& velocity, const Vec2& acceleration, double f_N_mag,
                                   const ParameterSet& params) {
  SlidingWrench w;
  w.state = sliding_state(velocity, acceleration, params);
  const Eigen::Matrix3d to_body = ee_to_body_rotation();

  w.contact.f_N = Vec3{0.0, 0.0, -f_N_mag};
  w.contact.f_R = rolling_resistance(f_N_mag, velocity, params);
  w.contact.in_contact = f_N_mag > 0;
  const Vec3 f_R = to_body * w.contact.f_R;
  const Vec3 f_w = required_driving_force(w.state, f_R);
  w.contact.f_w = to_body.transpose() * f_w;
  w.contact.tau_w = f_w.norm() * params.wheel_radius;

  w.thrust = required_thrust(w.state, to_body * w.contact.f_N);
  w.attitude_torque = exact_attitude_torque(w.state, f_w, f_R, params);
  w.disturbance = disturbance_torque(w.state, params);
  w.disturbance_bound = disturbance_torque_bound(w.state, params);
  w.residual = full_balance_residual(w.state, w.contact, w.thrust, w.attitude_torque, params);
  return w;
}

}  // namespace omnislide
