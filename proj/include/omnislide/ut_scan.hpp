#pragma once

// Synthetic EMAT-style ultrasonic testing: A-scans from a virtual plate,
// two-peak time-of-flight thickness estimation, and B/C-scan assembly.

#include "omnislide/core.hpp"
#include "omnislide/sliding_sim.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace omnislide {

/// Thickness map over [0, width] x [0, height] in {S}; values in metres,
/// row-major with row index along y.
class MaterialPlate {
 public:
  MaterialPlate(double width, double height, double cell_size, std::vector<double> thickness, double sound_speed,
                double nominal_thickness);

  static MaterialPlate uniform(double width, double height, double cell_size, double thickness,
                               double sound_speed = 3230.0);

  /// Sets every cell whose centre lies within `radius` of `center` to `thickness`.
  void add_circular_defect(const Vec2& center, double radius, double thickness);

  double width() const { return width_; }
  double height() const { return height_; }
  double cell_size() const { return cell_size_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double sound_speed() const { return sound_speed_; }
  double nominal_thickness() const { return nominal_; }
  const std::vector<double>& thickness() const { return thickness_; }
  double cell(std::size_t i, std::size_t j) const { return thickness_[j * nx_ + i]; }

  bool contains(const Vec2& pos) const;
  /// Bilinear interpolation between cell centres. Throws std::out_of_range off the plate.
  double thickness_at(const Vec2& pos) const;

 private:
  double width_;
  double height_;
  double cell_size_;
  std::size_t nx_;
  std::size_t ny_;
  std::vector<double> thickness_;
  double sound_speed_;
  double nominal_;
};

/// Plate JSON: {"width", "height", "cell_size" (m), "sound_speed" (m/s),
/// "nominal_thickness_mm", "thickness_mm": row-major grid in mm, flat or nested}.
MaterialPlate plate_from_json(const nlohmann::json& doc);
nlohmann::json plate_to_json(const MaterialPlate& plate);
MaterialPlate load_plate(const std::filesystem::path& path);

struct UtConfig {
  double sample_rate = 100e6;       // Hz
  double record_length = 50e-6;     // s
  double excitation_time = 5e-6;    // peak A epoch t0
  double center_frequency = 5e6;    // carrier of the tone burst
  double pulse_sigma = 0.12e-6;     // Gaussian envelope standard deviation
  double backwall_gain = -0.5;      // echo B amplitude relative to A (phase inverted)
  std::optional<double> snr_db = 30.0;  // relative to peak A; nullopt disables noise
  double liftoff_max = 0.004;
  // Estimation
  double detection_ratio = 6.0;     // peak must exceed this multiple of the noise floor
  double relative_threshold = 0.05; // and this fraction of the strongest peak
  double min_separation = 0.4e-6;   // s between distinct peaks
  double quality_full_ratio = 60.0; // echo/noise ratio mapped to quality 1
};

struct AScan {
  double sample_rate = 0.0;
  std::vector<double> samples;
  double liftoff = 0.0;
  bool valid = false;  // false when lift-off exceeded the sensor budget

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Two Gaussian-envelope tone bursts at t0 and t0 + 2 d / c, d interpolated at
/// `pos`, plus seeded white noise. Lift-off beyond the budget yields noise only.
AScan synthesize_ascan(const MaterialPlate& plate, const Vec2& pos, double liftoff, std::uint64_t noise_seed,
                       const UtConfig& config);

struct ThicknessEstimate {
  std::optional<double> thickness;  // m; nullopt when two peaks were not found
  double quality = 0.0;             // [0, 1]
};

/// Demodulated envelope of a scan (quadrature at the carrier, one-period boxcar).
std::vector<double> ascan_envelope(const AScan& scan, const UtConfig& config);

/// Thickness from the spacing of the two dominant envelope peaks, refined to
/// sub-sample precision by a parabola through the log-envelope.
ThicknessEstimate estimate_thickness(const AScan& scan, double sound_speed, const UtConfig& config);

struct ScanRecord {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> thickness;  // m
  double quality = 0.0;
};

struct CScanGeometry {
  double width = 0.0;
  double height = 0.0;
  double cell_size = 0.0;

  std::size_t nx() const;
  std::size_t ny() const;
};

enum class Aggregation { Mean, Latest, Min };

Aggregation parse_aggregation(const std::string& name);

struct CellIndex {
  std::size_t i = 0;
  std::size_t j = 0;
};

/// Per-cell thickness aggregate. A cell has a value only once it holds a sample.
class CScanGrid {
 public:
  CScanGrid(const CScanGeometry& geometry, Aggregation aggregation);

  /// Bins one record; returns the touched cell, or nullopt when the record has
  /// no thickness or lies outside the geometry.
  std::optional<CellIndex> add(const ScanRecord& record);

  /// Overwrites a cell with an absolute value and count (scan delta replay).
  void set_cell(CellIndex cell, double thickness, std::size_t count);

  const CScanGeometry& geometry() const { return geometry_; }
  Aggregation aggregation() const { return aggregation_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::optional<double> value(std::size_t i, std::size_t j) const;
  std::size_t count(std::size_t i, std::size_t j) const { return count_[j * nx_ + i]; }
  std::optional<CellIndex> locate(double x, double y) const;
  /// Fraction of cells with at least one sample.
  double coverage() const;

  bool operator==(const CScanGrid& other) const;

 private:
  CScanGeometry geometry_;
  Aggregation aggregation_;
  std::size_t nx_;
  std::size_t ny_;
  std::vector<double> value_;
  std::vector<std::size_t> count_;
};

CScanGrid assemble_cscan(const std::vector<ScanRecord>& records, const CScanGeometry& geometry,
                         Aggregation aggregation);

struct BScanLine {
  std::vector<double> distance;  // cumulative path length, m
  std::vector<std::optional<double>> thickness;
};

/// Records must be ordered by time.
BScanLine assemble_bscan(const std::vector<ScanRecord>& records);

/// Sampling of a trajectory by the sensor: one A-scan every `sample_interval`
/// states while over the plate, each with a seed derived from `seed` and the
/// state index.
std::vector<ScanRecord> scan_trajectory(const std::vector<SimState>& trajectory, const MaterialPlate& plate,
                                        double liftoff, std::size_t sample_interval, std::uint64_t seed,
                                        const UtConfig& config);

/// SplitMix64 mixing of a base seed with a record index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// time_us,amplitude
void write_ascan_csv(std::ostream& os, const AScan& scan);
/// t,x,y,thickness_mm,quality (empty thickness when not estimated)
void write_records_csv(std::ostream& os, const std::vector<ScanRecord>& records);
/// distance_m,thickness_mm
void write_bscan_csv(std::ostream& os, const BScanLine& line);
/// ny rows of nx thickness values in mm, first row at the lowest y; empty = no data.
void write_cscan_csv(std::ostream& os, const CScanGrid& grid);
/// Binary PGM (P5, maxval 255), first row at the highest y. No data -> 0;
/// otherwise 1 + round(254 * clamp((t - lo) / (hi - lo))) with t, lo, hi in mm.
void write_cscan_pgm(std::ostream& os, const CScanGrid& grid, double lo_mm, double hi_mm);

}  // namespace omnislide
