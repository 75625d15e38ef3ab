#pragma once

// Live simulation instance behind the teleop server. One thread calls
// advance(); any thread may post commands; the broadcaster drains snapshots.

#include "omnislide/envelope.hpp"
#include "omnislide/sliding_sim.hpp"
#include "omnislide/teleop/wire.hpp"
#include "omnislide/ut_scan.hpp"

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <stop_token>
#include <vector>

namespace omnislide::teleop {

struct TeleopOptions {
  double dt = 0.01;
  double broadcast_hz = 20.0;
  double scan_hz = 20.0;  // A-scan sampling rate while over the plate
  double liftoff = 0.001;
  std::uint64_t seed = 1;
  Aggregation aggregation = Aggregation::Mean;
  std::optional<Vec2> start;  // plate centre when absent
  UtConfig ut;
};

/// Everything a state/scan_delta broadcast needs, taken atomically.
struct Broadcast {
  SimState state;
  std::vector<SimEvent> events;  // emitted since the previous drain
  std::vector<ScanCell> cells;   // touched since the previous drain, absolute values
};

class TeleopSimulation {
 public:
  TeleopSimulation(ParameterSet params, MaterialPlate plate, TeleopOptions options);

  /// Latest wins; clamped to v_max here so no client value reaches the stepper unchecked.
  void command(const EEVelocity& v);
  void set_force(double f_N);
  /// Vehicle back to the start at rest with f_reference; the C-scan is kept.
  void request_reset();

  /// One fixed dt step with the current command. Single caller only.
  void advance();
  /// Steps at dt against the monotonic clock until `stop` is requested.
  void run_realtime(std::stop_token stop);

  Broadcast drain();
  SimState latest() const;
  std::vector<ScanCell> full_grid() const;
  CScanGrid grid() const;
  ConfigInfo config(bool in_control) const;
  std::uint64_t steps() const { return steps_.load(); }

  const ParameterSet& params() const { return params_; }
  const MaterialPlate& plate() const { return plate_; }
  const TeleopOptions& options() const { return options_; }

 private:
  ParameterSet params_;
  MaterialPlate plate_;
  TeleopOptions options_;
  FeasibleInterval force_range_;
  Vec2 start_;
  SurfaceBounds bounds_;
  std::uint64_t scan_every_;

  LatestValueMailbox<EEVelocity> cmd_;
  LatestValueMailbox<std::optional<double>> force_;
  std::atomic<bool> reset_requested_{false};
  std::uint64_t force_seen_ = 0;

  mutable std::mutex mutex_;  // guards the fields below
  SimState state_;
  CScanGrid grid_;
  std::vector<SimEvent> pending_events_;
  std::set<std::pair<std::size_t, std::size_t>> dirty_;  // (j, i)
  std::atomic<std::uint64_t> steps_{0};
};

}  // namespace omnislide::teleop
