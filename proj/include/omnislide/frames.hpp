#pragma once

#include "omnislide/core.hpp"

#include <Eigen/Geometry>

#include <array>
#include <optional>

namespace omnislide {

enum class FrameId { Inertial, Surface, EndEffector, Body };

const char* to_string(FrameId id);

/// Pose of a frame relative to its parent: p_parent = orientation * p_child + origin.
struct Frame {
  FrameId id;
  std::optional<FrameId> parent;
  Vec3 origin = Vec3::Zero();
  Eigen::Matrix3d orientation = Eigen::Matrix3d::Identity();
};

enum class VectorKind {
  Direction,  // free vector: rotation only
  Point,      // bound vector: rotation and translation
};

/// Rotation {E} -> {B}: X_E -> Y_B, Y_E -> Z_B, Z_E -> X_B.
Eigen::Matrix3d ee_to_body_rotation();

/// Embeds a surface-plane quantity (x_E, y_E) as a body-frame vector (0, x_E, y_E).
Vec3 plane_to_body(const Vec2& v);

/// The four frames of the sliding setup, rooted at {I}:
///   {I} -> {S}: wall-mounted surface frame (Z_S into the wall, Y_S up)
///   {S} -> {E}: end-effector at the sliding position, orientation held at zero
///   {E} -> {B}: vehicle body, CoM at l_C from the tip
class FrameTree {
 public:
  FrameTree() = default;
  FrameTree(const Vec2& ee_position, const ParameterSet& params);

  /// Registers or replaces a frame. Its parent must already be registered
  /// (std::out_of_range otherwise); only one root is allowed.
  void set(const Frame& frame);
  bool contains(FrameId id) const;
  const Frame& frame(FrameId id) const;

  /// Throws std::out_of_range when either frame is not registered.
  Vec3 transform(const Vec3& v, FrameId from, FrameId to, VectorKind kind = VectorKind::Direction) const;

 private:
  Eigen::Isometry3d to_root(FrameId id) const;

  std::array<std::optional<Frame>, 4> frames_;
};

}  // namespace omnislide
