#pragma once

// JSON text frames exchanged on ws://host:port/teleop. See docs/wire_protocol.md.

#include "omnislide/core.hpp"
#include "omnislide/envelope.hpp"
#include "omnislide/sliding_sim.hpp"
#include "omnislide/ut_scan.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <stdexcept>
#include <utility>
#include <string>
#include <variant>
#include <vector>

namespace omnislide::teleop {

struct CmdVel {
  double vx = 0.0;
  double vy = 0.0;
};
struct SetForce {
  double f_N = 0.0;
};
struct Reset {};

using ClientMessage = std::variant<CmdVel, SetForce, Reset>;

/// Error codes carried by {"type": "error"} frames.
inline constexpr const char* kErrMalformed = "malformed";
inline constexpr const char* kErrUnknownType = "unknown-type";
inline constexpr const char* kErrInvalidValue = "invalid-value";
inline constexpr const char* kErrNotInControl = "not-in-control";

class WireError : public std::runtime_error {
 public:
  WireError(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Throws WireError for non-JSON text, a missing/unknown "type", or missing,
/// non-numeric or non-finite fields. Extra fields are ignored.
ClientMessage parse_client_message(const std::string& text);

struct ScanCell {
  bool operator==(const ScanCell&) const = default;

  std::size_t i = 0;
  std::size_t j = 0;
  double thickness_mm = 0.0;
  std::size_t count = 0;
};

struct ConfigInfo {
  const MaterialPlate* plate = nullptr;
  ParameterSet params;
  FeasibleInterval force_range;
  double dt = 0.01;
  double rate_hz = 20.0;
  Vec2 start = Vec2::Zero();
  bool in_control = false;
};

nlohmann::json config_frame(const ConfigInfo& info);
/// `events` are all events emitted since the previous state frame.
nlohmann::json state_frame(const SimState& state, const std::vector<SimEvent>& events);
nlohmann::json scan_delta_frame(const std::vector<ScanCell>& cells);
nlohmann::json control_frame(bool in_control);
nlohmann::json error_frame(const std::string& code, const std::string& message);

/// Every cell of `grid` holding at least one sample.
std::vector<ScanCell> grid_cells(const CScanGrid& grid);

/// Client-side replay of scan_delta frames: cells keyed by (j, i), later
/// frames overwrite earlier ones.
class ScanReplay {
 public:
  /// Throws WireError when `frame` is not a well-formed scan_delta.
  void apply(const nlohmann::json& frame);
  /// Cells in the order grid_cells() reports them.
  std::vector<ScanCell> cells() const;

 private:
  std::map<std::pair<std::size_t, std::size_t>, ScanCell> cells_;
};

}  // namespace omnislide::teleop
