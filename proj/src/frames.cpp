#include "omnislide/frames.hpp"

#include <stdexcept>
#include <string>

namespace omnislide {
namespace {

std::size_t slot(FrameId id) { return static_cast<std::size_t>(id); }

Eigen::Matrix3d from_columns(const Vec3& x, const Vec3& y, const Vec3& z) {
  Eigen::Matrix3d m;
  m.col(0) = x;
  m.col(1) = y;
  m.col(2) = z;
  return m;
}

}  // namespace

const char* to_string(FrameId id) {
  switch (id) {
    case FrameId::Inertial: return "I";
    case FrameId::Surface: return "S";
    case FrameId::EndEffector: return "E";
    case FrameId::Body: return "B";
  }
  return "?";
}

Eigen::Matrix3d ee_to_body_rotation() {
  // Columns of R_{E<-B} are the body axes in {E}; transpose for {E} -> {B}.
  return from_columns(Vec3::UnitZ(), Vec3::UnitX(), Vec3::UnitY()).transpose();
}

Vec3 plane_to_body(const Vec2& v) { return {0.0, v.x(), v.y()}; }

FrameTree::FrameTree(const Vec2& ee_position, const ParameterSet& params) {
  set({FrameId::Inertial, std::nullopt});
  // Vertical wall: X_S horizontal (= Y_I), Y_S up (= Z_I), Z_S into the wall (= X_I).
  set({FrameId::Surface, FrameId::Inertial, Vec3::Zero(),
       from_columns(Vec3::UnitY(), Vec3::UnitZ(), Vec3::UnitX())});
  set({FrameId::EndEffector, FrameId::Surface, Vec3{ee_position.x(), ee_position.y(), 0.0}});
  const Eigen::Matrix3d body_in_ee = ee_to_body_rotation().transpose();
  set({FrameId::Body, FrameId::EndEffector, body_in_ee * params.l_C, body_in_ee});
}

bool FrameTree::contains(FrameId id) const { return frames_[slot(id)].has_value(); }

void FrameTree::set(const Frame& frame) {
  if (frame.parent) {
    if (*frame.parent == frame.id) throw std::invalid_argument("frame cannot be its own parent");
    if (!contains(*frame.parent)) {
      throw std::out_of_range(std::string("parent frame ") + to_string(*frame.parent) + " is not registered");
    }
  } else {
    for (std::size_t i = 0; i < frames_.size(); ++i) {
      if (i != slot(frame.id) && frames_[i] && !frames_[i]->parent) {
        throw std::invalid_argument("frame tree already has a root");
      }
    }
  }
  frames_[slot(frame.id)] = frame;
}

const Frame& FrameTree::frame(FrameId id) const {
  if (!contains(id)) throw std::out_of_range(std::string("unknown frame ") + to_string(id));
  return *frames_[slot(id)];
}

Eigen::Isometry3d FrameTree::to_root(FrameId id) const {
  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();
  std::optional<FrameId> current = id;
  for (std::size_t depth = 0; current; ++depth) {
    if (depth > frames_.size()) throw std::logic_error("cycle in frame tree");
    const Frame& f = frame(*current);
    Eigen::Isometry3d local = Eigen::Isometry3d::Identity();
    local.linear() = f.orientation;
    local.translation() = f.origin;
    pose = local * pose;
    current = f.parent;
  }
  return pose;
}

Vec3 FrameTree::transform(const Vec3& v, FrameId from, FrameId to, VectorKind kind) const {
  if (from == to) {
    frame(from);
    return v;
  }
  const Eigen::Isometry3d relative = to_root(to).inverse() * to_root(from);
  return kind == VectorKind::Direction ? Vec3(relative.linear() * v) : Vec3(relative * v);
}

}  // namespace omnislide
