#include "omnislide/sliding_sim.hpp"

#include "omnislide/params_json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace omnislide {
namespace {

using nlohmann::json;

EEVelocity scale_to(const Vec2& v, double limit) {
  const double n = v.norm();
  return n > limit ? EEVelocity::from(v * (limit / n)) : EEVelocity::from(v);
}

void require_dt(double dt) {
  if (!(dt > 0.0) || dt > 0.1) throw std::invalid_argument(fmt::format("step: dt must be in (0, 0.1], got {}", dt));
}

/// Largest fraction of `accel` keeping (b) and (d) satisfied. Both admit an
/// interval [0, s*] of scalings from the previous velocity, so bisection applies.
Vec2 clamp_to_feasible(const EEVelocity& prev, const Vec2& accel, double f_N, double dt, const ParameterSet& params) {
  const auto ok = [&](double s) {
    const Vec2 a = s * accel;
    const auto r = evaluate_constraints(f_N, EEVelocity::from(prev.vec() + a * dt), a, params);
    return r.cond_b.pass && r.cond_d.pass;
  };
  if (!ok(0.0)) return Vec2::Zero();
  double good = 0.0;
  double bad = 1.0;
  for (int i = 0; i < 80 && bad - good > 1e-15; ++i) {
    const double mid = 0.5 * (good + bad);
    (ok(mid) ? good : bad) = mid;
  }
  return good * accel;
}

Vec2 parse_point(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw FileFormatError(std::string(what) + " must be an [x, y] pair of numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

double number(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw FileFormatError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

void record_wrench(SimState& s, const ParameterSet& params) {
  const auto wrench = solve_sliding_wrench(s.vel.vec(), s.acc, s.f_N_cmd, params);
  s.disturbance_torque = wrench.disturbance_bound;
  s.residual = wrench.residual;
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::SlipLimit: return "SLIP_LIMIT";
    case EventKind::TorqueLimit: return "TORQUE_LIMIT";
    case EventKind::ForceLimit: return "FORCE_LIMIT";
    case EventKind::Bounds: return "BOUNDS";
  }
  return "?";
}

EEVelocity clamp_speed(const EEVelocity& cmd, double v_max) { return scale_to(cmd.vec(), v_max); }

EEVelocity rate_limit(const EEVelocity& cmd, const EEVelocity& prev, double dt, const ParameterSet& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("rate_limit: dt must be positive");
  Vec2 delta = cmd.vec() - prev.vec();
  const double max_dv = params.a_max * dt;
  if (delta.norm() > max_dv) delta *= max_dv / delta.norm();
  return scale_to(prev.vec() + delta, params.v_max);
}

RcCommand map_rc_input(double pwm_x, double pwm_y, const RcCalibration& cal, const ParameterSet& params) {
  if (!(cal.pwm_min < cal.pwm_mid && cal.pwm_mid < cal.pwm_max)) {
    throw std::invalid_argument("RC calibration requires pwm_min < pwm_mid < pwm_max");
  }
  RcCommand out;
  const auto axis = [&](double pwm) {
    if (!std::isfinite(pwm)) throw std::invalid_argument("RC input must be finite");
    if (pwm < cal.pwm_min || pwm > cal.pwm_max) {
      out.clamped = true;
      pwm = std::clamp(pwm, cal.pwm_min, cal.pwm_max);
    }
    const double half_band = 0.5 * cal.dead_band;
    const double offset = pwm - cal.pwm_mid;
    if (std::abs(offset) <= half_band) return 0.0;
    const double span = (offset > 0 ? cal.pwm_max - cal.pwm_mid : cal.pwm_mid - cal.pwm_min) - half_band;
    const double fraction = (std::abs(offset) - half_band) / span;
    return std::copysign(fraction * params.v_max, offset);
  };
  double vx = axis(pwm_x);
  double vy = axis(pwm_y);
  if (cal.swap_axes) std::swap(vx, vy);
  if (cal.invert_x) vx = -vx;
  if (cal.invert_y) vy = -vy;
  out.velocity = clamp_speed({vx, vy}, params.v_max);
  return out;
}

RcCalibration rc_calibration_from_json(const json& doc) {
  RcCalibration cal;
  for (const auto& [key, value] : doc.items()) {
    if (key == "pwm_min") cal.pwm_min = value.get<double>();
    else if (key == "pwm_mid") cal.pwm_mid = value.get<double>();
    else if (key == "pwm_max") cal.pwm_max = value.get<double>();
    else if (key == "dead_band") cal.dead_band = value.get<double>();
    else if (key == "swap_axes") cal.swap_axes = value.get<bool>();
    else if (key == "invert_x") cal.invert_x = value.get<bool>();
    else if (key == "invert_y") cal.invert_y = value.get<bool>();
    else throw FileFormatError("unknown RC calibration field '" + key + "'");
  }
  return cal;
}

SimState initial_state(const Vec2& pos, double f_N, const ParameterSet& params) {
  SimState s;
  s.pos = pos;
  s.f_N_cmd = std::clamp(f_N, 0.0, params.f_max);
  s.motor = inverse_kinematics(s.vel, params);
  s.constraint = evaluate_constraints(s.f_N_cmd, s.vel, s.acc, params);
  record_wrench(s, params);
  return s;
}

SimState step(const SimState& state, const EEVelocity& cmd, double dt, const ParameterSet& params,
              const SurfaceBounds& bounds) {
  require_dt(dt);
  if (!std::isfinite(cmd.vx) || !std::isfinite(cmd.vy)) throw std::invalid_argument("step: non-finite command");

  SimState next = state;
  next.events.clear();
  next.t = state.t + dt;

  if (state.f_N_cmd > params.f_max || state.f_N_cmd < 0) {
    next.f_N_cmd = std::clamp(state.f_N_cmd, 0.0, params.f_max);
    next.events.push_back({next.t, EventKind::ForceLimit,
                           fmt::format("normal force {:.3f} N clamped to {:.3f} N", state.f_N_cmd, next.f_N_cmd)});
  }
  const double f_N = next.f_N_cmd;

  // No commanded motion through a boundary the EE already rests on.
  Vec2 wanted = clamp_speed(cmd, params.v_max).vec();
  if ((state.pos.x() >= bounds.x_max && wanted.x() > 0) || (state.pos.x() <= bounds.x_min && wanted.x() < 0)) {
    wanted.x() = 0.0;
  }
  if ((state.pos.y() >= bounds.y_max && wanted.y() > 0) || (state.pos.y() <= bounds.y_min && wanted.y() < 0)) {
    wanted.y() = 0.0;
  }

  EEVelocity vel = rate_limit(EEVelocity::from(wanted), state.vel, dt, params);
  Vec2 acc = (vel.vec() - state.vel.vec()) / dt;
  ConstraintReport report = evaluate_constraints(f_N, vel, acc, params);

  if (!report.cond_b.pass || !report.cond_d.pass) {
    if (!report.cond_b.pass) {
      const EventKind kind = report.slip_bound_binding() ? EventKind::SlipLimit : EventKind::TorqueLimit;
      next.events.push_back({next.t, kind,
                             fmt::format("drive demand {:.4f} N exceeds {} = {:.4f} N", report.cond_b.demand,
                                         report.cond_b.binding, report.cond_b.bound)});
    }
    if (!report.cond_d.pass) {
      next.events.push_back({next.t, EventKind::TorqueLimit,
                             fmt::format("attitude disturbance {:.4f} N*m exceeds Gamma_max = {:.4f} N*m",
                                         report.cond_d.demand, report.cond_d.bound)});
    }
    acc = clamp_to_feasible(state.vel, acc, f_N, dt, params);
    vel = EEVelocity::from(state.vel.vec() + acc * dt);
    report = evaluate_constraints(f_N, vel, acc, params);
  }

  // Trapezoidal position update: exact for the piecewise-constant acceleration above.
  Vec2 pos = state.pos + 0.5 * (state.vel.vec() + vel.vec()) * dt;
  if (!bounds.contains(pos)) {
    const Vec2 clamped{std::clamp(pos.x(), bounds.x_min, bounds.x_max), std::clamp(pos.y(), bounds.y_min, bounds.y_max)};
    next.events.push_back({next.t, EventKind::Bounds,
                           fmt::format("position ({:.4f}, {:.4f}) clamped to ({:.4f}, {:.4f})", pos.x(), pos.y(),
                                       clamped.x(), clamped.y())});
    pos = clamped;
  }

  next.pos = pos;
  next.vel = vel;
  next.acc = acc;
  next.motor = inverse_kinematics(vel, params);
  next.constraint = report;
  record_wrench(next, params);
  return next;
}

double default_mission_timeout(const MissionSpec& mission, const ParameterSet& params) {
  double length = 0.0;
  Vec2 from = mission.start;
  for (const auto& wp : mission.waypoints) {
    length += (wp - from).norm();
    from = wp;
  }
  const double ramp = params.v_max / params.a_max;
  return 2.0 * (length / params.v_max + 2.0 * ramp * static_cast<double>(mission.waypoints.size())) + 10.0;
}

MissionResult run_mission(const MissionSpec& mission, const ParameterSet& params) {
  require_dt(mission.dt);
  if (!mission.bounds.contains(mission.start)) throw std::invalid_argument("mission start lies outside the bounds");
  for (std::size_t i = 0; i < mission.waypoints.size(); ++i) {
    if (!all_finite(mission.waypoints[i]) || !mission.bounds.contains(mission.waypoints[i])) {
      throw std::invalid_argument(fmt::format("waypoint {} lies outside the bounds", i));
    }
  }

  const double timeout = mission.timeout.value_or(default_mission_timeout(mission, params));
  // Near rest: one step of full deceleration or less.
  const double settle_speed = 2.0 * params.a_max * mission.dt;

  MissionResult result;
  SimState state = initial_state(mission.start, mission.f_N, params);
  result.trajectory.push_back(state);

  while (result.waypoints_reached < mission.waypoints.size()) {
    const Vec2 to_target = mission.waypoints[result.waypoints_reached] - state.pos;
    const double dist = to_target.norm();
    if (dist <= mission.arrival_tolerance && state.vel.norm() <= settle_speed) {
      ++result.waypoints_reached;
      continue;
    }
    if (state.t >= timeout) {
      result.timed_out = true;
      break;
    }
    EEVelocity cmd;
    if (dist > 0) {
      const double speed = std::min(params.v_max, std::sqrt(2.0 * params.a_max * dist));
      cmd = EEVelocity::from(to_target / dist * speed);
    }
    state = step(state, cmd, mission.dt, params, mission.bounds);
    result.trajectory.push_back(state);
  }
  return result;
}

std::vector<Vec2> lawnmower(double x0, double y0, double x1, double y1, double pitch) {
  if (!(pitch > 0)) throw std::invalid_argument("lawnmower: pitch must be positive");
  if (!(y1 >= y0)) throw std::invalid_argument("lawnmower: y1 must not be below y0");
  std::vector<Vec2> out;
  const auto passes = static_cast<std::size_t>(std::floor((y1 - y0) / pitch + 1e-9)) + 1;
  for (std::size_t i = 0; i < passes; ++i) {
    const double y = y0 + pitch * static_cast<double>(i);
    const bool forward = i % 2 == 0;
    out.emplace_back(forward ? x0 : x1, y);
    out.emplace_back(forward ? x1 : x0, y);
  }
  return out;
}

MissionSpec mission_from_json(const json& doc) {
  if (!doc.is_object()) throw FileFormatError("mission file must contain a JSON object");
  static const char* const kKnown[] = {"waypoints", "start", "dt", "f_N", "timeout", "arrival_tolerance",
                                       "bounds", "raster", "scan"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) { return key == k; }) ==
        std::end(kKnown)) {
      throw FileFormatError("unknown mission field '" + key + "'");
    }
  }
  MissionSpec m;
  try {
    if (doc.contains("start")) m.start = parse_point(doc["start"], "start");
    if (doc.contains("dt")) m.dt = number(doc, "dt");
    if (doc.contains("f_N")) m.f_N = number(doc, "f_N");
    if (doc.contains("timeout")) m.timeout = number(doc, "timeout");
    if (doc.contains("arrival_tolerance")) m.arrival_tolerance = number(doc, "arrival_tolerance");
    if (doc.contains("bounds")) {
      const auto& b = doc["bounds"];
      if (!b.is_array() || b.size() != 4) throw FileFormatError("bounds must be [x_min, y_min, x_max, y_max]");
      m.bounds = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    }
    if (doc.contains("waypoints")) {
      if (!doc["waypoints"].is_array()) throw FileFormatError("waypoints must be an array");
      for (const auto& wp : doc["waypoints"]) m.waypoints.push_back(parse_point(wp, "waypoint"));
    }
    if (doc.contains("raster")) {
      const auto& r = doc["raster"];
      const auto more = lawnmower(number(r, "x0"), number(r, "y0"), number(r, "x1"), number(r, "y1"),
                                  number(r, "pitch"));
      m.waypoints.insert(m.waypoints.end(), more.begin(), more.end());
    }
  } catch (const json::exception& e) {
    throw FileFormatError(std::string("malformed mission: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FileFormatError(std::string("malformed mission: ") + e.what());
  }
  return m;
}

void write_trajectory_csv(std::ostream& os, const std::vector<SimState>& trajectory) {
  os << "t,x,y,vx,vy,ax,ay,u1,u2,u3,f_N,margin_b,margin_c,margin_d,event\n";
  for (const auto& s : trajectory) {
    std::string events;
    for (const auto& e : s.events) {
      if (!events.empty()) events += '|';
      events += to_string(e.kind);
    }
    os << fmt::format("{:.4f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.4f},{:.6f},{:.6f},{:.6f},{}\n",
                      s.t, s.pos.x(), s.pos.y(), s.vel.vx, s.vel.vy, s.acc.x(), s.acc.y(), s.motor.u1, s.motor.u2,
                      s.motor.u3, s.f_N_cmd, s.constraint.cond_b.margin, s.constraint.cond_c.margin,
                      s.constraint.cond_d.margin, events);
  }
}

}  // namespace omnislide
