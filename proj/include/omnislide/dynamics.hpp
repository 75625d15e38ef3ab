#pragma once

// Body-frame rigid-body balance of the vehicle while the end-effector slides.
//
//   M dv/dt + h + g = [T_a; tau_a] + [f_w + f_R + f_N; f_w x l_w + f_R x l_C]
//
// with v_ang = 0, a lumped scalar mass (M_lin = m I) and the contact force
// passing through the tip. All vectors in {B}.

#include "omnislide/contact.hpp"
#include "omnislide/core.hpp"
#include "omnislide/kinematics.hpp"

namespace omnislide {

struct GeneralizedState {
  Vec3 v_lin = Vec3::Zero();  // first component 0 while in contact
  Vec3 v_ang = Vec3::Zero();  // zero throughout sliding
  Vec3 a_lin = Vec3::Zero();
  double mass = 0.0;          // M_lin = mass * I
  Vec3 h_lin = Vec3::Zero();
  Vec3 g_lin = Vec3::Zero();
  Vec3 g_ang = Vec3::Zero();
};

/// State for planar motion (velocity, acceleration in {E}) with gravity and
/// CoM offset taken from the parameter set; h_lin = 0.
GeneralizedState sliding_state(const Vec2& velocity, const Vec2& acceleration, const ParameterSet& params);

/// l_w = l_C / |l_C| * (|l_C| - R_w). Throws std::invalid_argument when |l_C| <= R_w
/// (unless R_w = 0, where l_w = l_C).
Vec3 lever_arm_lw(const Vec3& l_C, double wheel_radius);
Vec3 lever_arm_lw(const ParameterSet& params);

/// f_w = M_lin a + h_lin - f_R.
Vec3 required_driving_force(const GeneralizedState& state, const Vec3& f_R);

/// Disturbance (M_lin a + h_lin) x l_w transmitted to the attitude loop.
Vec3 disturbance_torque(const GeneralizedState& state, const ParameterSet& params);

/// (|M_lin a| + |h_lin|) |l_w|, the quantity bounded by Gamma_max.
double disturbance_torque_bound(const GeneralizedState& state, const ParameterSet& params);

/// tau_a = g_ang - (M_lin a + h_lin) x l_w. Treats f_R x l_C as f_R x l_w,
/// an error of at most |f_R| R_w.
Vec3 required_attitude_torque(const GeneralizedState& state, const ParameterSet& params);

/// tau_a = g_ang - f_w x l_w - f_R x l_C, without the lever-arm approximation.
Vec3 exact_attitude_torque(const GeneralizedState& state, const Vec3& f_w, const Vec3& f_R, const ParameterSet& params);

/// T_a = g_lin - f_N: thrust compensates gravity and presses on the surface.
Vec3 required_thrust(const GeneralizedState& state, const Vec3& f_N);

struct BalanceResidual {
  double linear = 0.0;   // N
  double angular = 0.0;  // N*m
};

/// Residual norms of both balance equations. `contact` is in {E} and is rotated
/// into {B}; f_N contributes f_N x l_C, which vanishes when it acts along l_C.
BalanceResidual full_balance_residual(const GeneralizedState& state, const ContactState& contact, const Vec3& T_a,
                                      const Vec3& tau_a, const ParameterSet& params);

/// Complete wrench solution for one sliding instant: contact forces from the
/// motion, driving force from the linear balance, thrust and exact attitude torque.
struct SlidingWrench {
  GeneralizedState state;
  ContactState contact;  // {E}
  Vec3 thrust = Vec3::Zero();
  Vec3 attitude_torque = Vec3::Zero();
  Vec3 disturbance = Vec3::Zero();
  double disturbance_bound = 0.0;
  BalanceResidual residual;
};

SlidingWrench solve_sliding_wrench(const Vec2& velocity, const Vec2& acceleration, double f_N_mag,
                                   const ParameterSet& params);

}  // namespace omnislide
