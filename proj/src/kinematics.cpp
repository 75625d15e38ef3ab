#include "omnislide/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace omnislide {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;

void require_radius(const ParameterSet& params) {
  if (!(params.wheel_radius > 0) || !std::isfinite(params.wheel_radius)) {
    throw std::invalid_argument("wheel_radius must be positive and finite");
  }
}

}  // namespace

MotorSpeeds inverse_kinematics(const EEVelocity& v, const ParameterSet& params) {
  require_radius(params);
  if (!std::isfinite(v.vx) || !std::isfinite(v.vy)) {
    throw std::invalid_argument("inverse_kinematics: non-finite velocity");
  }
  const double r = params.wheel_radius;
  return {v.vx / r, -v.vx / (2 * r) - kSqrt3 * v.vy / (2 * r), -v.vx / (2 * r) + kSqrt3 * v.vy / (2 * r)};
}

ForwardKinematicsResult forward_kinematics(const MotorSpeeds& u, const ParameterSet& params) {
  require_radius(params);
  if (!std::isfinite(u.u1) || !std::isfinite(u.u2) || !std::isfinite(u.u3)) {
    throw std::invalid_argument("forward_kinematics: non-finite motor speed");
  }
  const double r = params.wheel_radius;
  // J^T J = (3 / (2 R^2)) I, so the pseudo-inverse is (2 R^2 / 3) J^T.
  ForwardKinematicsResult out;
  out.velocity.vx = (2 * r / 3) * (u.u1 - 0.5 * u.u2 - 0.5 * u.u3);
  out.velocity.vy = (2 * r / 3) * (kSqrt3 / 2) * (u.u3 - u.u2);
  out.residual = (u.vec() - inverse_kinematics(out.velocity, params).vec()).norm();
  return out;
}

}  // namespace omnislide
