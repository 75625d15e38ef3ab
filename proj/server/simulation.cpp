#include "omnislide/teleop/simulation.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace omnislide::teleop {

TeleopSimulation::TeleopSimulation(ParameterSet params, MaterialPlate plate, TeleopOptions options)
    : params_(std::move(params)),
      plate_(std::move(plate)),
      options_(std::move(options)),
      grid_({plate_.width(), plate_.height(), plate_.cell_size()}, options_.aggregation) {
  require_valid(params_);
  if (!(options_.dt > 0) || options_.dt > 0.1) throw std::invalid_argument("teleop dt must be in (0, 0.1]");
  if (!(options_.broadcast_hz > 0) || !(options_.scan_hz > 0)) {
    throw std::invalid_argument("teleop rates must be positive");
  }
  force_range_ = feasible_force_interval(params_.v_max, params_.a_max, params_, params_.hardware_cap);
  start_ = options_.start.value_or(Vec2(0.5 * plate_.width(), 0.5 * plate_.height()));
  bounds_ = {0.0, 0.0, plate_.width(), plate_.height()};
  if (!bounds_.contains(start_)) throw std::invalid_argument("teleop start lies off the plate");
  scan_every_ = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::lround(1.0 / (options_.scan_hz * options_.dt))));
  state_ = initial_state(start_, params_.f_reference, params_);
}

void TeleopSimulation::command(const EEVelocity& v) {
  if (!std::isfinite(v.vx) || !std::isfinite(v.vy)) throw std::invalid_argument("command must be finite");
  cmd_.post(clamp_speed(v, params_.v_max));
}

void TeleopSimulation::set_force(double f_N) {
  if (!std::isfinite(f_N)) throw std::invalid_argument("normal force must be finite");
  force_.post(f_N);
}

void TeleopSimulation::request_reset() { reset_requested_ = true; }

void TeleopSimulation::advance() {
  const bool reset = reset_requested_.exchange(false);
  if (reset) cmd_.post({});
  const EEVelocity cmd = cmd_.current();
  std::optional<double> new_force;
  if (const auto seq = force_.sequence(); seq != force_seen_) {
    force_seen_ = seq;
    new_force = force_.current();
  }

  std::lock_guard lock(mutex_);
  if (reset) {
    const double t = state_.t;
    state_ = initial_state(start_, params_.f_reference, params_);
    state_.t = t;
  }
  SimState s = state_;
  if (new_force) s.f_N_cmd = *new_force;  // step() clamps and reports FORCE_LIMIT
  state_ = step(s, cmd, options_.dt, params_, bounds_);
  pending_events_.insert(pending_events_.end(), state_.events.begin(), state_.events.end());

  const std::uint64_t k = steps_.fetch_add(1) + 1;
  if (k % scan_every_ == 0 && plate_.contains(state_.pos)) {
    const AScan scan = synthesize_ascan(plate_, state_.pos, options_.liftoff, derive_seed(options_.seed, k), options_.ut);
    const ThicknessEstimate est = estimate_thickness(scan, plate_.sound_speed(), options_.ut);
    if (const auto cell = grid_.add({state_.t, state_.pos.x(), state_.pos.y(), est.thickness, est.quality})) {
      dirty_.insert({cell->j, cell->i});
    }
  }
}

void TeleopSimulation::run_realtime(std::stop_token stop) {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(options_.dt));
  auto next = clock::now();
  while (!stop.stop_requested()) {
    advance();
    next += period;
    const auto now = clock::now();
    // After a long stall, resume from now instead of bursting to catch up.
    if (now - next > std::chrono::seconds(1)) next = now;
    std::this_thread::sleep_until(next);
  }
}

Broadcast TeleopSimulation::drain() {
  std::lock_guard lock(mutex_);
  Broadcast b;
  b.state = state_;
  b.events.swap(pending_events_);
  for (const auto& [j, i] : dirty_) b.cells.push_back({i, j, *grid_.value(i, j) * 1e3, grid_.count(i, j)});
  dirty_.clear();
  return b;
}

SimState TeleopSimulation::latest() const {
  std::lock_guard lock(mutex_);
  return state_;
}

std::vector<ScanCell> TeleopSimulation::full_grid() const {
  std::lock_guard lock(mutex_);
  return grid_cells(grid_);
}

CScanGrid TeleopSimulation::grid() const {
  std::lock_guard lock(mutex_);
  return grid_;
}

ConfigInfo TeleopSimulation::config(bool in_control) const {
  ConfigInfo info;
  info.plate = &plate_;
  info.params = params_;
  info.force_range = force_range_;
  info.dt = options_.dt;
  info.rate_hz = options_.broadcast_hz;
  info.start = start_;
  info.in_control = in_control;
  return info;
}

}  // namespace omnislide::teleop
