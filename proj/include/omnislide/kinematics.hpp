#pragma once

#include "omnislide/core.hpp"

namespace omnislide {

/// Planar end-effector velocity in {E} (m/s).
struct EEVelocity {
  double vx = 0.0;
  double vy = 0.0;

  Vec2 vec() const { return {vx, vy}; }
  double norm() const { return vec().norm(); }
  static EEVelocity from(const Vec2& v) { return {v.x(), v.y()}; }
};

/// Omniwheel motor speeds (rad/s). Sign convention follows the three-wheel
/// map below literally: u1's wheel drives along +X_E, u2 and u3 sit at +/-120 deg.
struct MotorSpeeds {
  double u1 = 0.0;
  double u2 = 0.0;
  double u3 = 0.0;

  Eigen::Vector3d vec() const { return {u1, u2, u3}; }
  double sum() const { return u1 + u2 + u3; }
};

struct ForwardKinematicsResult {
  EEVelocity velocity;
  double residual = 0.0;  // |u - inverse_kinematics(velocity)|, rad/s
};

/// u1 = vx/R, u2 = -vx/(2R) - sqrt(3) vy/(2R), u3 = -vx/(2R) + sqrt(3) vy/(2R).
/// EE yaw is held at zero, so the wheel offset does not enter.
MotorSpeeds inverse_kinematics(const EEVelocity& v, const ParameterSet& params);

/// Least-squares inverse of inverse_kinematics(). The residual vanishes iff
/// u1 + u2 + u3 = 0, i.e. the speeds are consistent with pure translation.
ForwardKinematicsResult forward_kinematics(const MotorSpeeds& u, const ParameterSet& params);

}  // namespace omnislide
