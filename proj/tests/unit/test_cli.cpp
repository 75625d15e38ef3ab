#include "omnislide/cli.hpp"
#include "omnislide/teleop/server.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace omnislide;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "omnislide");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(OMNISLIDE_CONFIG_DIR) + "/" + name; }
std::string data(const std::string& name) { return std::string(OMNISLIDE_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("omnislide_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(CliFeasibility, ReferenceParameterFile) {
  const auto r = run_cli({"feasibility", "--params", config("default_params.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "[10.00, 15.00] N");
  EXPECT_NE(r.out.find("(b) pass"), std::string::npos);
}

TEST(CliFeasibility, EmptyIntervalExitsOne) {
  const auto dir = scratch("empty");
  std::ofstream(dir / "p.json") << R"({"f_min_contact": 20, "hardware_cap": 15})";
  const auto r = run_cli({"feasibility", "--params", (dir / "p.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("empty"), std::string::npos);
}

TEST(CliFeasibility, InputErrorsExitTwo) {
  EXPECT_EQ(run_cli({"feasibility", "--params", "/definitely/missing.json"}).code, 2);
  const auto dir = scratch("invalid");
  std::ofstream(dir / "bad.json") << R"({"mu_static": 0.01})";
  const auto r = run_cli({"feasibility", "--params", (dir / "bad.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("mu_R < mu_S"), std::string::npos);
  std::ofstream(dir / "typo.json") << R"({"mass": 4})";
  EXPECT_EQ(run_cli({"feasibility", "--params", (dir / "typo.json").string()}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"feasibility", "--format", "xml"}).code, 2);
}

TEST(CliFeasibility, JsonReportAndSweep) {
  const auto dir = scratch("sweep");
  const auto r = run_cli({"feasibility", "--format", "json", "--out", dir.string(), "--sweep", "f_N", "--from", "5",
                          "--to", "30", "--samples", "6"});
  EXPECT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(doc["interval"][1].get<double>(), 25.0);
  EXPECT_TRUE(fs::exists(dir / "feasibility.json"));
  EXPECT_EQ(slurp(dir / "sweep_f_N.csv"), slurp(std::string(OMNISLIDE_FIXTURE_DIR) + "/sweep_f_N_golden.csv"));
}

TEST(CliSimulate, WritesDeterministicTrajectory) {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  const auto ra = run_cli({"simulate", "--mission", data("square_mission.json"), "--out", a.string()});
  const auto rb = run_cli({"simulate", "--mission", data("square_mission.json"), "--out", b.string()});
  EXPECT_EQ(ra.code, 0) << ra.err;
  EXPECT_EQ(rb.code, 0);
  const auto text = slurp(a / "trajectory.csv");
  EXPECT_EQ(text, slurp(b / "trajectory.csv"));
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x,y,vx,vy,ax,ay,u1,u2,u3,f_N,margin_b,margin_c,margin_d,event");
  EXPECT_NE(ra.out.find("3/3 waypoints"), std::string::npos);
}

TEST(CliSimulate, TimeoutExitsOne) {
  const auto dir = scratch("timeout");
  std::ofstream(dir / "m.json") << R"({"waypoints": [[0.1, 0.0]], "timeout": 2.0})";
  const auto r = run_cli({"simulate", "--mission", (dir / "m.json").string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
}

TEST(CliSimulate, BadMissionExitsTwo) {
  const auto dir = scratch("badmission");
  std::ofstream(dir / "m.json") << R"({"waypoints": [[0.5, 0.5]], "bounds": [0, 0, 0.2, 0.2]})";
  EXPECT_EQ(run_cli({"simulate", "--mission", (dir / "m.json").string(), "--out", dir.string()}).code, 2);
  EXPECT_EQ(run_cli({"simulate", "--out", dir.string()}).code, 2);
  std::ofstream(dir / "j.json") << R"({"waypoints": )";
  EXPECT_EQ(run_cli({"simulate", "--mission", (dir / "j.json").string()}).code, 2);
}

TEST(CliScan, TrajectoryFileAndOutputs) {
  const auto dir = scratch("scan");
  std::ofstream(dir / "m.json") << R"({"start": [0.02, 0.105], "waypoints": [[0.18, 0.105]]})";
  ASSERT_EQ(run_cli({"simulate", "--mission", (dir / "m.json").string(), "--out", dir.string()}).code, 0);
  const auto r = run_cli({"scan", "--plate", data("defect_plate.json"), "--trajectory",
                          (dir / "trajectory.csv").string(), "--out", dir.string(), "--seed", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"records.csv", "bscan.csv", "cscan.csv", "cscan.pgm", "ascan_sample.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(slurp(dir / "cscan.pgm").substr(0, 3), "P5\n");
  // B-scan along y = 0.105 dips through the defect.
  std::ifstream bscan(dir / "bscan.csv");
  std::string line;
  std::getline(bscan, line);
  double min_mm = 1e9;
  while (std::getline(bscan, line)) {
    const auto comma = line.find(',');
    if (comma + 1 < line.size()) min_mm = std::min(min_mm, std::stod(line.substr(comma + 1)));
  }
  EXPECT_LT(min_mm, 8.2);
}

TEST(CliScan, NeedsExactlyOneSource) {
  EXPECT_EQ(run_cli({"scan", "--plate", data("defect_plate.json")}).code, 2);
  EXPECT_EQ(run_cli({"scan", "--mission", data("raster_mission.json")}).code, 2);
}

TEST(CliServe, BadPlateExitsTwo) {
  const auto dir = scratch("serve");
  std::ofstream(dir / "plate.json") << R"({"width": 0.1})";
  EXPECT_EQ(run_cli({"serve", "--plate", (dir / "plate.json").string(), "--port", "0"}).code, 2);
}

TEST(CliServe, PortInUseExitsTwo) {
  auto sim = std::make_shared<teleop::TeleopSimulation>(ParameterSet::defaults(), cli::demo_plate(),
                                                        teleop::TeleopOptions{});
  teleop::ServerOptions opt;
  opt.port = 0;
  teleop::TeleopServer holder(sim, opt);
  const auto port = holder.start();
  const auto r = run_cli({"serve", "--port", std::to_string(port)});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cannot listen"), std::string::npos);
}
