#pragma once

// Subcommands of the `omnislide` tool. Each returns the process exit code:
// 0 success, 1 analysis-negative (empty interval, mission timeout), 2 input error.

#include "omnislide/ut_scan.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace omnislide::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitInputError = 2;

enum class Format { Csv, Json };

struct RunConfig {
  std::optional<std::filesystem::path> params_path;  // built-in defaults when absent
  std::optional<std::filesystem::path> plate_path;
  std::optional<std::filesystem::path> mission_path;
  std::optional<std::filesystem::path> trajectory_path;  // scan: previously simulated CSV
  std::optional<std::filesystem::path> output_dir;  // "." for simulate/scan when absent
  std::optional<double> dt;
  std::uint64_t seed = 1;
  unsigned short port = 8765;
  std::string host = "127.0.0.1";
  std::optional<std::filesystem::path> static_dir;
  Format format = Format::Csv;

  // feasibility --sweep
  std::optional<std::string> sweep_axis;
  double sweep_from = 0.0;
  double sweep_to = 0.0;
  std::size_t sweep_samples = 51;
};

/// Scan settings read from a mission's "scan" object.
struct ScanSettings {
  double liftoff = 0.001;   // m
  double sample_hz = 20.0;  // A-scans per second of simulated time
  Aggregation aggregation = Aggregation::Mean;
  std::optional<double> cell_size;  // C-scan cell; plate cell size when absent
  std::optional<double> snr_db = 30.0;
};

ScanSettings scan_settings_from_json(const nlohmann::json& doc);

/// Built-in 0.2 x 0.2 m, 10 mm plate with an 8 mm thin disc of 10 mm radius at its centre.
MaterialPlate demo_plate();

int cmd_feasibility(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_scan(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_serve(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Usage errors exit 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Applies OMNISLIDE_LOG (trace|debug|info|warn|error|critical|off) to the default logger.
void configure_logging();

}  // namespace omnislide::cli
