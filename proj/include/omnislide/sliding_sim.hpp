#pragma once

// Fixed-step simulation of commanded sliding on a flat surface.
//
// Each step rate-limits the command (|dv| <= a_max dt, |v| <= v_max), checks
// the constraint set at the resulting operating point and, when traction,
// motor or attitude limits would be exceeded, shrinks the acceleration onto
// the feasible boundary and emits an event. Slip itself is never simulated.

#include "omnislide/core.hpp"
#include "omnislide/dynamics.hpp"
#include "omnislide/envelope.hpp"
#include "omnislide/kinematics.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace omnislide {

enum class EventKind { SlipLimit, TorqueLimit, ForceLimit, Bounds };

const char* to_string(EventKind kind);

struct SimEvent {
  double t = 0.0;
  EventKind kind = EventKind::Bounds;
  std::string detail;
};

/// Axis-aligned limits of the sliding area in {S}; unbounded by default.
struct SurfaceBounds {
  double x_min = -std::numeric_limits<double>::infinity();
  double y_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();
  double y_max = std::numeric_limits<double>::infinity();

  bool contains(const Vec2& p) const { return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max; }
};

struct SimState {
  double t = 0.0;
  Vec2 pos = Vec2::Zero();  // {S}, m
  EEVelocity vel;
  Vec2 acc = Vec2::Zero();
  double f_N_cmd = 0.0;
  MotorSpeeds motor;
  ConstraintReport constraint;
  double disturbance_torque = 0.0;  // (|M a| + |h|) |l_w|, N*m
  BalanceResidual residual;
  std::vector<SimEvent> events;  // emitted during the step that produced this state
};

/// Scales `cmd` down to at most v_max.
EEVelocity clamp_speed(const EEVelocity& cmd, double v_max);

/// Acceleration cap first (|v - prev| <= a_max dt), then speed cap (|v| <= v_max).
/// Throws std::invalid_argument for dt <= 0.
EEVelocity rate_limit(const EEVelocity& cmd, const EEVelocity& prev, double dt, const ParameterSet& params);

/// RC stick calibration, microseconds. The dead band is the full width around mid.
struct RcCalibration {
  double pwm_min = 1000.0;
  double pwm_mid = 1500.0;
  double pwm_max = 2000.0;
  double dead_band = 10.0;
  bool swap_axes = false;  // stick x drives Y_E
  bool invert_x = false;
  bool invert_y = false;
};

struct RcCommand {
  EEVelocity velocity;
  bool clamped = false;  // a PWM value was outside [pwm_min, pwm_max]
};

/// Per axis: mid -> 0, max -> +v_max, min -> -v_max, linear outside the dead
/// band. The combined vector is capped at v_max.
RcCommand map_rc_input(double pwm_x, double pwm_y, const RcCalibration& calibration, const ParameterSet& params);

RcCalibration rc_calibration_from_json(const nlohmann::json& doc);

/// At rest at `pos`, pressing with `f_N` (clamped to [0, f_max]).
SimState initial_state(const Vec2& pos, double f_N, const ParameterSet& params);

/// Advances by dt in (0, 0.1]; throws std::invalid_argument otherwise.
/// Deterministic: identical inputs give bit-identical outputs.
SimState step(const SimState& state, const EEVelocity& cmd, double dt, const ParameterSet& params,
              const SurfaceBounds& bounds = {});

struct MissionSpec {
  std::vector<Vec2> waypoints;
  Vec2 start = Vec2::Zero();
  double dt = 0.01;
  double f_N = 10.0;
  std::optional<double> timeout;  // s; derived from path length when absent
  double arrival_tolerance = 0.001;
  SurfaceBounds bounds;
};

struct MissionResult {
  std::vector<SimState> trajectory;  // starts with the initial state
  std::size_t waypoints_reached = 0;
  bool timed_out = false;

  bool completed(const MissionSpec& mission) const { return waypoints_reached == mission.waypoints.size(); }
};

/// Drives toward each waypoint in turn with speed min(v_max, sqrt(2 a_max d)),
/// a waypoint counting as reached once within tolerance and nearly at rest.
/// Throws std::invalid_argument if a waypoint or the start lies outside the bounds.
MissionResult run_mission(const MissionSpec& mission, const ParameterSet& params);

/// Timeout used when a mission does not state one.
double default_mission_timeout(const MissionSpec& mission, const ParameterSet& params);

/// Boustrophedon passes along X at y = y0, y0 + pitch, ... up to y1 (inclusive
/// within 1e-9), alternating direction.
std::vector<Vec2> lawnmower(double x0, double y0, double x1, double y1, double pitch);

/// Mission JSON:
///   {"waypoints": [[x, y], ...], "start": [x, y], "dt": s, "f_N": N, "timeout": s,
///    "arrival_tolerance": m, "bounds": [x_min, y_min, x_max, y_max],
///    "raster": {"x0":..,"y0":..,"x1":..,"y1":..,"pitch":..},
///    "scan": {...}}
/// "raster" appends lawnmower waypoints; "scan" is read by the scan pipeline.
MissionSpec mission_from_json(const nlohmann::json& doc);

/// Columns: t,x,y,vx,vy,ax,ay,u1,u2,u3,f_N,margin_b,margin_c,margin_d,event
void write_trajectory_csv(std::ostream& os, const std::vector<SimState>& trajectory);

/// Latest-wins slot between command producers and the single stepping owner.
template <typename T>
class LatestValueMailbox {
 public:
  explicit LatestValueMailbox(T initial = {}) : value_(std::move(initial)) {}

  void post(T value) {
    std::lock_guard lock(mutex_);
    value_ = std::move(value);
    ++sequence_;
  }

  T current() const {
    std::lock_guard lock(mutex_);
    return value_;
  }

  std::uint64_t sequence() const {
    std::lock_guard lock(mutex_);
    return sequence_;
  }

 private:
  mutable std::mutex mutex_;
  T value_;
  std::uint64_t sequence_ = 0;
};

}  // namespace omnislide
