#pragma once

// Shared vocabulary for the omni-sliding end-effector model.
//
// Units (SI everywhere, no exceptions):
//
//   quantity                     unit     field
//   ---------------------------  -------  -------------------------
//   wheel radius, offsets, l_C   m        wheel_radius, wheel_offset, l_C
//   friction coefficients        -        mu_rolling, mu_static
//   safety factor                -        safety_factor
//   motor torque                 N*m      tau_w_max
//   wheel load capacity          kg       wheel_load_capacity
//   forces                       N        f_max, f_min_contact, hardware_cap, f_reference
//   torque disturbance bound     N*m      Gamma_max
//   mass                         kg       system_mass
//   velocity / acceleration      m/s, m/s^2  v_max, a_max
//   compliance / lift-off        m        compliance_budget, liftoff_max
//   gravitational acceleration   m/s^2    gravity_body (vector, body frame)
//
// Body frame {B}: origin at the vehicle CoM, X_B along the end-effector boom
// pointing into the work surface, (Y_B, Z_B) aligned with (X_E, Y_E).

#include <Eigen/Core>

#include <limits>
#include <string>
#include <vector>

namespace omnislide {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kGravity = 9.81;
inline constexpr int kWheelCount = 3;

bool all_finite(const Vec2& v);
bool all_finite(const Vec3& v);

struct ParameterSet {
  double wheel_radius = 0.024;        // R_w
  double wheel_offset = 0.06;         // d_W, geometry rendering only
  int wheel_count = kWheelCount;
  double mu_rolling = 0.03;           // mu_R
  double mu_static = 0.35;            // mu_S
  double safety_factor = 0.5;         // eta
  double tau_w_max = 1.5;             // total of the three motors
  double wheel_load_capacity = 9.0;   // C_wheel, total over wheels
  double f_max = 25.0;
  double Gamma_max = 2.0;
  double f_min_contact = 10.0;
  double system_mass = 4.4;
  Vec3 l_C{-0.5, 0.0, 0.0};           // EE tip COG -> vehicle CoM, body frame
  double v_max = 0.01;
  double a_max = 0.02;
  double compliance_budget = 0.003;
  double liftoff_max = 0.004;

  // Quantifies "much less/greater than" in the contact and wheel-load conditions.
  double dominance_ratio = 5.0;
  // Load-test cap on |f_N|; +inf when not measured.
  double hardware_cap = std::numeric_limits<double>::infinity();
  // Operating normal force setpoint.
  double f_reference = 10.0;
  // Gravitational acceleration in {B}; default wall vertical with Z_B up.
  Vec3 gravity_body{0.0, 0.0, -kGravity};
  // CoM offset from the geometric centre producing g_ang; zero by default.
  Vec3 com_offset{0.0, 0.0, 0.0};

  static ParameterSet defaults() { return {}; }
};

struct Violation {
  std::string field;
  std::string relation;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const ParameterSet& params);

/// Throws std::invalid_argument carrying the report summary when validation fails.
void require_valid(const ParameterSet& params);

}  // namespace omnislide
