#include "omnislide/ut_scan.hpp"
#include "omnislide/params_json.hpp"

#include "../support/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace omnislide;
using omnislide::fixtures::oracle_value;

namespace {

MaterialPlate defect_plate() {
  auto plate = MaterialPlate::uniform(0.2, 0.2, 0.01, 0.010);
  plate.add_circular_defect({0.105, 0.105}, 0.010, 0.008);
  return plate;
}

}  // namespace

TEST(MaterialPlate, UniformAndDefect) {
  const auto plate = defect_plate();
  EXPECT_EQ(plate.nx(), 20u);
  EXPECT_EQ(plate.ny(), 20u);
  EXPECT_DOUBLE_EQ(plate.thickness_at({0.025, 0.025}), 0.010);
  EXPECT_DOUBLE_EQ(plate.thickness_at({0.105, 0.105}), 0.008);
  EXPECT_THROW(plate.thickness_at({0.25, 0.1}), std::out_of_range);
  EXPECT_FALSE(plate.contains({-0.001, 0.1}));
}

TEST(MaterialPlate, BilinearBetweenCentres) {
  MaterialPlate plate(0.02, 0.01, 0.01, {0.010, 0.008}, 3230.0, 0.010);
  EXPECT_NEAR(plate.thickness_at({0.01, 0.005}), 0.009, 1e-15);
  EXPECT_NEAR(plate.thickness_at({0.0075, 0.005}), 0.0095, 1e-15);
  EXPECT_DOUBLE_EQ(plate.thickness_at({0.001, 0.005}), 0.010);  // clamped outside centres
}

TEST(MaterialPlate, JsonRoundTripAndErrors) {
  const auto plate = defect_plate();
  const auto back = plate_from_json(plate_to_json(plate));
  EXPECT_EQ(back.nx(), plate.nx());
  for (std::size_t k = 0; k < plate.thickness().size(); ++k) {
    EXPECT_NEAR(back.thickness()[k], plate.thickness()[k], 1e-15);
  }
  auto doc = plate_to_json(plate);
  doc["colour"] = "red";
  EXPECT_THROW(plate_from_json(doc), FileFormatError);
  doc = plate_to_json(plate);
  doc["thickness_mm"] = nlohmann::json::array({1.0, 2.0});
  EXPECT_THROW(plate_from_json(doc), FileFormatError);
}

TEST(Synthesis, NoiseFreeEchoSpacing) {
  const auto plate = MaterialPlate::uniform(0.1, 0.1, 0.01, 0.010);
  UtConfig cfg;
  cfg.snr_db.reset();
  const auto scan = synthesize_ascan(plate, {0.05, 0.05}, 0.0, 1, cfg);
  ASSERT_TRUE(scan.valid);
  EXPECT_EQ(scan.samples.size(), 5000u);
  const auto env = ascan_envelope(scan, cfg);
  // Strongest envelope sample near t0, second near t0 + 2d/c.
  const auto t0_idx = static_cast<std::size_t>(cfg.excitation_time * cfg.sample_rate);
  const auto sep = oracle_value("ut", "separation_10mm_us") * 1e-6 * cfg.sample_rate;
  const auto b_idx = static_cast<std::size_t>(std::lround(static_cast<double>(t0_idx) + sep));
  EXPECT_GT(env[t0_idx], 0.8);  // boxcar smoothing lowers the peak
  EXPECT_GT(env[b_idx], 0.4);
  EXPECT_LT(env[(t0_idx + b_idx) / 2], 1e-3);
}

TEST(Synthesis, SeedDeterminism) {
  const auto plate = defect_plate();
  const UtConfig cfg;
  const auto a = synthesize_ascan(plate, {0.05, 0.05}, 0.001, 42, cfg);
  const auto b = synthesize_ascan(plate, {0.05, 0.05}, 0.001, 42, cfg);
  const auto c = synthesize_ascan(plate, {0.05, 0.05}, 0.001, 43, cfg);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(9, 5), derive_seed(9, 5));
}

TEST(Estimation, NoiseFreeThicknessIsSubSample) {
  const auto plate = MaterialPlate::uniform(0.1, 0.1, 0.01, 0.010);
  UtConfig cfg;
  cfg.snr_db.reset();
  for (double d : {0.004, 0.006, 0.008, 0.010, 0.0123, 0.02}) {
    const auto p = MaterialPlate::uniform(0.1, 0.1, 0.01, d);
    const auto est = estimate_thickness(synthesize_ascan(p, {0.05, 0.05}, 0.0, 1, cfg), p.sound_speed(), cfg);
    ASSERT_TRUE(est.thickness) << d;
    // Well inside one sample's thickness equivalent.
    EXPECT_NEAR(*est.thickness, d, 0.25 * oracle_value("ut", "sample_equiv_mm") * 1e-3) << d;
    EXPECT_DOUBLE_EQ(est.quality, 1.0);
  }
}

TEST(Estimation, NoisyThicknessWithinTenthMillimetre) {
  const auto plate = defect_plate();
  const UtConfig cfg;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (const Vec2 pos : {Vec2(0.03, 0.03), Vec2(0.105, 0.105)}) {
      const auto scan = synthesize_ascan(plate, pos, 0.002, seed, cfg);
      const auto est = estimate_thickness(scan, plate.sound_speed(), cfg);
      ASSERT_TRUE(est.thickness);
      EXPECT_NEAR(*est.thickness, plate.thickness_at(pos), 1e-4);
      EXPECT_GT(est.quality, 0.3);
    }
  }
}

TEST(Estimation, LiftoffBeyondBudgetGivesNoThickness) {
  const auto plate = defect_plate();
  const UtConfig cfg;
  const auto scan = synthesize_ascan(plate, {0.05, 0.05}, 0.005, 3, cfg);
  EXPECT_FALSE(scan.valid);
  const auto est = estimate_thickness(scan, plate.sound_speed(), cfg);
  EXPECT_FALSE(est.thickness);
  EXPECT_DOUBLE_EQ(est.quality, 0.0);
}

TEST(Estimation, EmptyScanGivesNoThickness) {
  AScan empty;
  empty.sample_rate = 100e6;
  EXPECT_FALSE(estimate_thickness(empty, 3230.0, UtConfig{}).thickness);
}

TEST(CScan, AggregationModes) {
  const CScanGeometry geo{0.02, 0.02, 0.01};
  CScanGrid mean(geo, Aggregation::Mean), latest(geo, Aggregation::Latest), min(geo, Aggregation::Min);
  for (double t : {0.010, 0.008, 0.009}) {
    const ScanRecord r{0.0, 0.005, 0.015, t, 1.0};
    mean.add(r);
    latest.add(r);
    min.add(r);
  }
  EXPECT_NEAR(*mean.value(0, 1), 0.009, 1e-15);
  EXPECT_DOUBLE_EQ(*latest.value(0, 1), 0.009);
  EXPECT_DOUBLE_EQ(*min.value(0, 1), 0.008);
  EXPECT_EQ(mean.count(0, 1), 3u);
  EXPECT_FALSE(mean.value(1, 1));
  EXPECT_DOUBLE_EQ(mean.coverage(), 0.25);
  EXPECT_FALSE(mean.add({0.0, 0.5, 0.5, 0.01, 1.0}));
  EXPECT_FALSE(mean.add({0.0, 0.005, 0.005, std::nullopt, 0.0}));
  EXPECT_THROW(parse_aggregation("median"), std::invalid_argument);
}

TEST(CScan, AssemblyIsOrderIndependentForMean) {
  const CScanGeometry geo{0.1, 0.1, 0.01};
  std::vector<ScanRecord> records;
  for (int k = 0; k < 200; ++k) {
    records.push_back({0.01 * k, 0.0005 * k, 0.0004 * k, 0.008 + 0.00001 * (k % 7), 1.0});
  }
  const auto a = assemble_cscan(records, geo, Aggregation::Min);
  std::reverse(records.begin(), records.end());
  const auto b = assemble_cscan(records, geo, Aggregation::Min);
  EXPECT_TRUE(a == b);
}

TEST(BScan, DistanceAccumulates) {
  const std::vector<ScanRecord> recs{{0.0, 0.0, 0.0, 0.01, 1.0}, {0.1, 0.003, 0.004, std::nullopt, 0.0},
                                     {0.2, 0.003, 0.005, 0.008, 1.0}};
  const auto line = assemble_bscan(recs);
  ASSERT_EQ(line.distance.size(), 3u);
  EXPECT_NEAR(line.distance[1], 0.005, 1e-15);
  EXPECT_NEAR(line.distance[2], 0.006, 1e-15);
  EXPECT_FALSE(line.thickness[1]);
}

TEST(Writers, CScanCsvAndPgm) {
  CScanGrid grid({0.02, 0.02, 0.01}, Aggregation::Mean);
  grid.add({0.0, 0.005, 0.005, 0.008, 1.0});
  grid.add({0.0, 0.015, 0.015, 0.010, 1.0});
  std::ostringstream csv;
  write_cscan_csv(csv, grid);
  EXPECT_EQ(csv.str(), "8.0000,\n,10.0000\n");
  std::ostringstream pgm;
  write_cscan_pgm(pgm, grid, 8.0, 10.0);
  const std::string bytes = pgm.str();
  const std::string header = "P5\n2 2\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 4);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  // Top row is highest y: (no data, 10 mm), then (8 mm, no data).
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 0]), 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 1]), 255);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 2]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 3]), 0);
}

TEST(ScanTrajectory, RecordsFollowSamplingInterval) {
  const auto plate = defect_plate();
  const auto p = ParameterSet::defaults();
  MissionSpec m;
  m.start = {0.02, 0.105};
  m.waypoints = {{0.18, 0.105}};
  const auto result = run_mission(m, p);
  const auto records = scan_trajectory(result.trajectory, plate, 0.001, 5, 7, UtConfig{});
  EXPECT_EQ(records.size(), (result.trajectory.size() + 4) / 5);
  std::size_t defect_hits = 0;
  for (const auto& r : records) {
    ASSERT_TRUE(r.thickness);
    EXPECT_NEAR(*r.thickness, plate.thickness_at({r.x, r.y}), 1e-4);
    if (*r.thickness < 0.009) ++defect_hits;
  }
  EXPECT_GT(defect_hits, 0u);
  const auto again = scan_trajectory(result.trajectory, plate, 0.001, 5, 7, UtConfig{});
  for (std::size_t k = 0; k < records.size(); ++k) EXPECT_EQ(records[k].thickness, again[k].thickness);
}
