#include "omnislide/ut_scan.hpp"

#include "omnislide/params_json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace omnislide {
namespace {

using nlohmann::json;

std::size_t cells_along(double extent, double cell) {
  return static_cast<std::size_t>(std::ceil(extent / cell - 1e-9));
}

double noise_sigma(const UtConfig& config) {
  return config.snr_db ? std::pow(10.0, -*config.snr_db / 20.0) : 0.0;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

/// Sub-sample peak offset from a parabola through log-envelope samples
/// (exact for a Gaussian envelope); falls back to a plain parabola.
double refine_peak(const std::vector<double>& env, std::size_t i) {
  if (i == 0 || i + 1 >= env.size()) return static_cast<double>(i);
  double l = env[i - 1], c = env[i], r = env[i + 1];
  if (l > 0 && c > 0 && r > 0) {
    l = std::log(l);
    c = std::log(c);
    r = std::log(r);
  }
  const double denom = l - 2 * c + r;
  if (denom >= 0) return static_cast<double>(i);
  return static_cast<double>(i) + 0.5 * (l - r) / denom;
}

std::string mm(double metres) { return fmt::format("{:.4f}", metres * 1e3); }

}  // namespace

MaterialPlate::MaterialPlate(double width, double height, double cell_size, std::vector<double> thickness,
                             double sound_speed, double nominal_thickness)
    : width_(width),
      height_(height),
      cell_size_(cell_size),
      nx_(0),
      ny_(0),
      thickness_(std::move(thickness)),
      sound_speed_(sound_speed),
      nominal_(nominal_thickness) {
  if (!(width > 0) || !(height > 0) || !(cell_size > 0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw std::invalid_argument("plate geometry must be positive and finite");
  }
  if (!(sound_speed > 0) || !std::isfinite(sound_speed)) throw std::invalid_argument("sound speed must be positive");
  if (!(nominal_thickness > 0)) throw std::invalid_argument("nominal thickness must be positive");
  nx_ = cells_along(width, cell_size);
  ny_ = cells_along(height, cell_size);
  if (thickness_.size() != nx_ * ny_) {
    throw std::invalid_argument(fmt::format("thickness grid has {} values, expected {} x {} = {}", thickness_.size(),
                                            nx_, ny_, nx_ * ny_));
  }
  for (double t : thickness_) {
    if (!(t > 0) || !std::isfinite(t)) throw std::invalid_argument("thickness values must be positive and finite");
  }
}

MaterialPlate MaterialPlate::uniform(double width, double height, double cell_size, double thickness,
                                     double sound_speed) {
  const std::size_t n = cells_along(width, cell_size) * cells_along(height, cell_size);
  return {width, height, cell_size, std::vector<double>(n, thickness), sound_speed, thickness};
}

void MaterialPlate::add_circular_defect(const Vec2& center, double radius, double thickness) {
  if (!(thickness > 0)) throw std::invalid_argument("defect thickness must be positive");
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      const Vec2 c{(static_cast<double>(i) + 0.5) * cell_size_, (static_cast<double>(j) + 0.5) * cell_size_};
      if ((c - center).norm() <= radius) thickness_[j * nx_ + i] = thickness;
    }
  }
}

bool MaterialPlate::contains(const Vec2& pos) const {
  return pos.x() >= 0 && pos.x() <= width_ && pos.y() >= 0 && pos.y() <= height_;
}

double MaterialPlate::thickness_at(const Vec2& pos) const {
  if (!all_finite(pos) || !contains(pos)) {
    throw std::out_of_range(fmt::format("position ({}, {}) is off the plate", pos.x(), pos.y()));
  }
  // Continuous cell coordinates with cell centres at integers.
  const double gx = std::clamp(pos.x() / cell_size_ - 0.5, 0.0, static_cast<double>(nx_ - 1));
  const double gy = std::clamp(pos.y() / cell_size_ - 0.5, 0.0, static_cast<double>(ny_ - 1));
  const auto i0 = static_cast<std::size_t>(std::floor(gx));
  const auto j0 = static_cast<std::size_t>(std::floor(gy));
  const std::size_t i1 = std::min(i0 + 1, nx_ - 1);
  const std::size_t j1 = std::min(j0 + 1, ny_ - 1);
  const double fx = gx - static_cast<double>(i0);
  const double fy = gy - static_cast<double>(j0);
  const double bottom = (1 - fx) * cell(i0, j0) + fx * cell(i1, j0);
  const double top = (1 - fx) * cell(i0, j1) + fx * cell(i1, j1);
  return (1 - fy) * bottom + fy * top;
}

MaterialPlate plate_from_json(const json& doc) {
  if (!doc.is_object()) throw FileFormatError("plate file must contain a JSON object");
  static const char* const kKnown[] = {"width", "height", "cell_size", "sound_speed", "nominal_thickness_mm",
                                       "thickness_mm"};
  for (const auto& [key, _] : doc.items()) {
    if (std::none_of(std::begin(kKnown), std::end(kKnown), [&](const char* k) { return key == k; })) {
      throw FileFormatError("unknown plate field '" + key + "'");
    }
  }
  try {
    std::vector<double> grid;
    const auto& t = doc.at("thickness_mm");
    if (!t.is_array()) throw FileFormatError("thickness_mm must be an array");
    for (const auto& row : t) {
      if (row.is_array()) {
        for (const auto& v : row) grid.push_back(v.get<double>() * 1e-3);
      } else {
        grid.push_back(row.get<double>() * 1e-3);
      }
    }
    const double sound_speed = doc.value("sound_speed", 3230.0);
    const double nominal =
        doc.contains("nominal_thickness_mm") ? doc["nominal_thickness_mm"].get<double>() * 1e-3 : median(grid);
    return {doc.at("width").get<double>(), doc.at("height").get<double>(), doc.at("cell_size").get<double>(),
            std::move(grid), sound_speed, nominal};
  } catch (const json::exception& e) {
    throw FileFormatError(std::string("malformed plate: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FileFormatError(std::string("invalid plate: ") + e.what());
  }
}

json plate_to_json(const MaterialPlate& plate) {
  json rows = json::array();
  for (std::size_t j = 0; j < plate.ny(); ++j) {
    json row = json::array();
    for (std::size_t i = 0; i < plate.nx(); ++i) row.push_back(std::round(plate.cell(i, j) * 1e7) / 1e4);
    rows.push_back(std::move(row));
  }
  return {{"width", plate.width()},
          {"height", plate.height()},
          {"cell_size", plate.cell_size()},
          {"sound_speed", plate.sound_speed()},
          {"nominal_thickness_mm", plate.nominal_thickness() * 1e3},
          {"thickness_mm", std::move(rows)}};
}

MaterialPlate load_plate(const std::filesystem::path& path) { return plate_from_json(read_json_file(path)); }

AScan synthesize_ascan(const MaterialPlate& plate, const Vec2& pos, double liftoff, std::uint64_t noise_seed,
                       const UtConfig& config) {
  const double d = plate.thickness_at(pos);
  AScan scan;
  scan.sample_rate = config.sample_rate;
  scan.liftoff = liftoff;
  scan.valid = liftoff >= 0 && liftoff <= config.liftoff_max;
  const auto n = static_cast<std::size_t>(std::llround(config.record_length * config.sample_rate));
  scan.samples.assign(n, 0.0);

  if (scan.valid) {
    const double t_a = config.excitation_time;
    const double t_b = t_a + 2.0 * d / plate.sound_speed();
    const double omega = 2.0 * std::numbers::pi * config.center_frequency;
    const double inv_two_var = 1.0 / (2.0 * config.pulse_sigma * config.pulse_sigma);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / config.sample_rate;
      const double da = t - t_a;
      const double db = t - t_b;
      scan.samples[i] = std::exp(-da * da * inv_two_var) * std::cos(omega * da) +
                        config.backwall_gain * std::exp(-db * db * inv_two_var) * std::cos(omega * db);
    }
  }

  const double sigma = noise_sigma(config);
  if (sigma > 0) {
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& s : scan.samples) s += noise(rng);
  }
  return scan;
}

std::vector<double> ascan_envelope(const AScan& scan, const UtConfig& config) {
  const std::size_t n = scan.samples.size();
  const double omega = 2.0 * std::numbers::pi * config.center_frequency;
  std::vector<double> in_phase_sum(n + 1, 0.0);
  std::vector<double> quadrature_sum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = omega * static_cast<double>(i) / scan.sample_rate;
    in_phase_sum[i + 1] = in_phase_sum[i] + scan.samples[i] * std::cos(phase);
    quadrature_sum[i + 1] = quadrature_sum[i] + scan.samples[i] * std::sin(phase);
  }
  const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(scan.sample_rate / config.center_frequency)));
  std::vector<double> env(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= window / 2 ? i - window / 2 : 0;
    const std::size_t hi = std::min(n, lo + window);
    const double count = static_cast<double>(hi - lo);
    const double ip = (in_phase_sum[hi] - in_phase_sum[lo]) / count;
    const double q = (quadrature_sum[hi] - quadrature_sum[lo]) / count;
    env[i] = 2.0 * std::hypot(ip, q);
  }
  return env;
}

ThicknessEstimate estimate_thickness(const AScan& scan, double sound_speed, const UtConfig& config) {
  ThicknessEstimate out;
  if (!scan.valid || scan.samples.size() < 3) return out;

  const std::vector<double> env = ascan_envelope(scan, config);
  const double floor = median(env);
  const double strongest = *std::max_element(env.begin(), env.end());
  const double threshold = std::max(config.detection_ratio * floor, config.relative_threshold * strongest);

  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < env.size(); ++i) {
    if (env[i] > threshold && env[i] >= env[i - 1] && env[i] > env[i + 1]) peaks.push_back(i);
  }
  if (peaks.size() < 2) return out;
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return env[a] > env[b]; });

  const auto min_gap = static_cast<std::size_t>(std::ceil(config.min_separation * scan.sample_rate));
  const std::size_t first = peaks.front();
  std::optional<std::size_t> second;
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    const std::size_t gap = peaks[k] > first ? peaks[k] - first : first - peaks[k];
    if (gap >= min_gap) {
      second = peaks[k];
      break;
    }
  }
  if (!second) return out;

  const double t_first = refine_peak(env, first) / scan.sample_rate;
  const double t_second = refine_peak(env, *second) / scan.sample_rate;
  out.thickness = sound_speed * std::abs(t_second - t_first) / 2.0;

  const double weaker = std::min(env[first], env[*second]);
  if (floor <= 0) {
    out.quality = 1.0;
  } else {
    const double ratio = weaker / floor;
    out.quality = std::clamp((ratio - config.detection_ratio) / (config.quality_full_ratio - config.detection_ratio),
                             0.0, 1.0);
  }
  if (out.quality <= 0) out.thickness.reset();
  return out;
}

std::size_t CScanGeometry::nx() const { return cells_along(width, cell_size); }
std::size_t CScanGeometry::ny() const { return cells_along(height, cell_size); }

Aggregation parse_aggregation(const std::string& name) {
  if (name == "mean") return Aggregation::Mean;
  if (name == "latest") return Aggregation::Latest;
  if (name == "min") return Aggregation::Min;
  throw std::invalid_argument("unknown aggregation '" + name + "' (expected mean, latest or min)");
}

CScanGrid::CScanGrid(const CScanGeometry& geometry, Aggregation aggregation)
    : geometry_(geometry), aggregation_(aggregation), nx_(0), ny_(0) {
  if (!(geometry.width > 0) || !(geometry.height > 0) || !(geometry.cell_size > 0)) {
    throw std::invalid_argument("C-scan geometry must be positive");
  }
  nx_ = geometry.nx();
  ny_ = geometry.ny();
  value_.assign(nx_ * ny_, 0.0);
  count_.assign(nx_ * ny_, 0);
}

std::optional<CellIndex> CScanGrid::locate(double x, double y) const {
  if (!(x >= 0 && x <= geometry_.width && y >= 0 && y <= geometry_.height)) return std::nullopt;
  const auto i = std::min(static_cast<std::size_t>(x / geometry_.cell_size), nx_ - 1);
  const auto j = std::min(static_cast<std::size_t>(y / geometry_.cell_size), ny_ - 1);
  return CellIndex{i, j};
}

std::optional<CellIndex> CScanGrid::add(const ScanRecord& record) {
  if (!record.thickness || record.quality <= 0) return std::nullopt;
  const auto cell = locate(record.x, record.y);
  if (!cell) return std::nullopt;
  const std::size_t k = cell->j * nx_ + cell->i;
  const double t = *record.thickness;
  const std::size_t n = ++count_[k];
  switch (aggregation_) {
    case Aggregation::Mean:
      value_[k] += (t - value_[k]) / static_cast<double>(n);
      break;
    case Aggregation::Latest:
      value_[k] = t;
      break;
    case Aggregation::Min:
      value_[k] = n == 1 ? t : std::min(value_[k], t);
      break;
  }
  return cell;
}

void CScanGrid::set_cell(CellIndex cell, double thickness, std::size_t count) {
  if (cell.i >= nx_ || cell.j >= ny_) throw std::out_of_range("C-scan cell index out of range");
  value_[cell.j * nx_ + cell.i] = count ? thickness : 0.0;
  count_[cell.j * nx_ + cell.i] = count;
}

std::optional<double> CScanGrid::value(std::size_t i, std::size_t j) const {
  const std::size_t k = j * nx_ + i;
  if (count_.at(k) == 0) return std::nullopt;
  return value_[k];
}

double CScanGrid::coverage() const {
  const auto covered = std::count_if(count_.begin(), count_.end(), [](std::size_t c) { return c > 0; });
  return static_cast<double>(covered) / static_cast<double>(count_.size());
}

bool CScanGrid::operator==(const CScanGrid& other) const {
  return nx_ == other.nx_ && ny_ == other.ny_ && value_ == other.value_ && count_ == other.count_;
}

CScanGrid assemble_cscan(const std::vector<ScanRecord>& records, const CScanGeometry& geometry,
                         Aggregation aggregation) {
  CScanGrid grid(geometry, aggregation);
  for (const auto& r : records) grid.add(r);
  return grid;
}

BScanLine assemble_bscan(const std::vector<ScanRecord>& records) {
  BScanLine line;
  double travelled = 0.0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (k > 0) travelled += std::hypot(records[k].x - records[k - 1].x, records[k].y - records[k - 1].y);
    line.distance.push_back(travelled);
    line.thickness.push_back(records[k].thickness);
  }
  return line;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<ScanRecord> scan_trajectory(const std::vector<SimState>& trajectory, const MaterialPlate& plate,
                                        double liftoff, std::size_t sample_interval, std::uint64_t seed,
                                        const UtConfig& config) {
  if (sample_interval == 0) throw std::invalid_argument("scan_trajectory: sample interval must be positive");
  std::vector<ScanRecord> records;
  for (std::size_t k = 0; k < trajectory.size(); k += sample_interval) {
    const SimState& s = trajectory[k];
    if (!plate.contains(s.pos)) continue;
    const AScan scan = synthesize_ascan(plate, s.pos, liftoff, derive_seed(seed, k), config);
    const ThicknessEstimate est = estimate_thickness(scan, plate.sound_speed(), config);
    records.push_back({s.t, s.pos.x(), s.pos.y(), est.thickness, est.quality});
  }
  return records;
}

void write_ascan_csv(std::ostream& os, const AScan& scan) {
  os << "time_us,amplitude\n";
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    os << fmt::format("{:.4f},{:.6f}\n", static_cast<double>(i) / scan.sample_rate * 1e6, scan.samples[i]);
  }
}

void write_records_csv(std::ostream& os, const std::vector<ScanRecord>& records) {
  os << "t,x,y,thickness_mm,quality\n";
  for (const auto& r : records) {
    os << fmt::format("{:.4f},{:.6f},{:.6f},{},{:.4f}\n", r.t, r.x, r.y, r.thickness ? mm(*r.thickness) : "",
                      r.quality);
  }
}

void write_bscan_csv(std::ostream& os, const BScanLine& line) {
  os << "distance_m,thickness_mm\n";
  for (std::size_t k = 0; k < line.distance.size(); ++k) {
    os << fmt::format("{:.6f},{}\n", line.distance[k], line.thickness[k] ? mm(*line.thickness[k]) : "");
  }
}

void write_cscan_csv(std::ostream& os, const CScanGrid& grid) {
  for (std::size_t j = 0; j < grid.ny(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      if (i) os << ',';
      if (const auto v = grid.value(i, j)) os << mm(*v);
    }
    os << '\n';
  }
}

void write_cscan_pgm(std::ostream& os, const CScanGrid& grid, double lo_mm, double hi_mm) {
  if (!(hi_mm > lo_mm)) throw std::invalid_argument("PGM scale requires hi > lo");
  os << "P5\n" << grid.nx() << ' ' << grid.ny() << "\n255\n";
  for (std::size_t row = 0; row < grid.ny(); ++row) {
    const std::size_t j = grid.ny() - 1 - row;
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      unsigned char px = 0;
      if (const auto v = grid.value(i, j)) {
        const double f = std::clamp((*v * 1e3 - lo_mm) / (hi_mm - lo_mm), 0.0, 1.0);
        px = static_cast<unsigned char>(1 + std::lround(254.0 * f));
      }
      os.put(static_cast<char>(px));
    }
  }
}

}  // namespace omnislide
