#include "omnislide/cli.hpp"

#include "omnislide/envelope.hpp"
#include "omnislide/params_json.hpp"
#include "omnislide/sliding_sim.hpp"
#include "omnislide/teleop/server.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace omnislide::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Input problems surface as exit 2 regardless of where they are detected.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ParameterSet load_params(const RunConfig& config) {
  ParameterSet params = config.params_path ? load_parameters(*config.params_path) : ParameterSet::defaults();
  const auto report = validate(params);
  if (!report.ok()) throw InputError("invalid parameters: " + report.summary());
  return params;
}

fs::path output_dir(const RunConfig& config) {
  const fs::path dir = config.output_dir.value_or(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  return dir;
}

std::ofstream open_output(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const FileFormatError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInputError;
}

json check_json(const ConstraintCheck& c) {
  return {{"pass", c.pass}, {"demand", c.demand}, {"bound", c.bound}, {"margin", c.margin}, {"binding", c.binding}};
}

std::string fmt_limit(double v) { return std::isinf(v) ? "none" : fmt::format("{:.2f} N", v); }

MissionSpec load_mission(const RunConfig& config, json* raw = nullptr) {
  const json doc = read_json_file(*config.mission_path);
  MissionSpec mission = mission_from_json(doc);
  if (config.dt) mission.dt = *config.dt;
  if (raw) *raw = doc;
  return mission;
}

std::vector<SimState> read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw FileFormatError("'" + path.string() + "' is empty");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    for (std::string col; std::getline(hs, col, ',');) header.push_back(col);
  }
  const auto col = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FileFormatError(fmt::format("trajectory CSV lacks a '{}' column", name));
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ct = col("t"), cx = col("x"), cy = col("y");
  std::vector<SimState> out;
  for (std::size_t row = 2; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    SimState s;
    try {
      s.t = std::stod(cells.at(ct));
      s.pos = {std::stod(cells.at(cx)), std::stod(cells.at(cy))};
    } catch (const std::exception&) {
      throw FileFormatError(fmt::format("{}:{}: malformed trajectory row", path.string(), row));
    }
    out.push_back(s);
  }
  if (out.empty()) throw FileFormatError("'" + path.string() + "' has no trajectory rows");
  return out;
}

void write_trajectory_json(std::ostream& os, const std::vector<SimState>& traj) {
  json arr = json::array();
  for (const auto& s : traj) {
    json events = json::array();
    for (const auto& e : s.events) events.push_back(to_string(e.kind));
    arr.push_back({{"t", s.t},
                   {"x", s.pos.x()},
                   {"y", s.pos.y()},
                   {"vx", s.vel.vx},
                   {"vy", s.vel.vy},
                   {"ax", s.acc.x()},
                   {"ay", s.acc.y()},
                   {"u", {s.motor.u1, s.motor.u2, s.motor.u3}},
                   {"f_N", s.f_N_cmd},
                   {"margins",
                    {{"b", s.constraint.cond_b.margin},
                     {"c", s.constraint.cond_c.margin},
                     {"d", s.constraint.cond_d.margin}}},
                   {"events", events}});
  }
  os << arr.dump(1) << '\n';
}

void write_records_json(std::ostream& os, const std::vector<ScanRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({{"t", r.t},
                   {"x", r.x},
                   {"y", r.y},
                   {"thickness_mm", r.thickness ? json(*r.thickness * 1e3) : json(nullptr)},
                   {"quality", r.quality}});
  }
  os << arr.dump(1) << '\n';
}

std::size_t count_events(const std::vector<SimState>& traj) {
  std::size_t n = 0;
  for (const auto& s : traj) n += s.events.size();
  return n;
}

}  // namespace

ScanSettings scan_settings_from_json(const json& doc) {
  ScanSettings s;
  if (!doc.is_object()) throw FileFormatError("mission 'scan' must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "liftoff") s.liftoff = value.get<double>();
    else if (key == "sample_hz") s.sample_hz = value.get<double>();
    else if (key == "aggregation") s.aggregation = parse_aggregation(value.get<std::string>());
    else if (key == "cell_size") s.cell_size = value.get<double>();
    else if (key == "snr_db") s.snr_db = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
    else throw FileFormatError("unknown scan field '" + key + "'");
  }
  if (!(s.liftoff >= 0) || !(s.sample_hz > 0)) throw FileFormatError("scan liftoff must be >= 0 and sample_hz > 0");
  if (s.cell_size && !(*s.cell_size > 0)) throw FileFormatError("scan cell_size must be positive");
  return s;
}

MaterialPlate demo_plate() {
  auto plate = MaterialPlate::uniform(0.2, 0.2, 0.01, 0.010);
  plate.add_circular_defect({0.1, 0.1}, 0.010, 0.008);
  return plate;
}

int cmd_feasibility(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ParameterSet p = load_params(config);
    const FeasibleInterval fi = feasible_force_interval(p.v_max, p.a_max, p, p.hardware_cap);
    const OperatingPoint at{fi.f_low, {p.v_max, 0.0}, {p.a_max, 0.0}};
    const ConstraintReport r = evaluate_constraints(at.f_N, at.velocity, at.acceleration, p);

    const json report = {
        {"interval", {fi.f_low, fi.f_up}},
        {"empty", fi.empty},
        {"limits",
         {{"f_min_contact", p.f_min_contact},
          {"hardware_cap", std::isinf(p.hardware_cap) ? json(nullptr) : json(p.hardware_cap)},
          {"f_max", p.f_max},
          {"constraint_sup", fi.constraint_sup ? json(*fi.constraint_sup) : json(nullptr)},
          {"b_bound", fi.analytic_b_bound && std::isfinite(*fi.analytic_b_bound) ? json(*fi.analytic_b_bound)
                                                                                 : json(nullptr)}}},
        {"evaluated_at", {{"f_N", at.f_N}, {"v", p.v_max}, {"a", p.a_max}}},
        {"conditions",
         {{"a", check_json(r.cond_a)}, {"b", check_json(r.cond_b)}, {"c", check_json(r.cond_c)}, {"d", check_json(r.cond_d)}}},
    };

    if (config.format == Format::Json) {
      out << report.dump(2) << '\n';
    } else {
      out << fmt::format("[{:.2f}, {:.2f}] N{}\n", fi.f_low, fi.f_up, fi.empty ? " (empty)" : "");
      out << fmt::format("limits: f_min_contact {}, hardware_cap {}, f_max {}, constraints {}\n", fmt_limit(p.f_min_contact),
                         fmt_limit(p.hardware_cap), fmt_limit(p.f_max),
                         fi.constraint_sup ? fmt_limit(*fi.constraint_sup) : "none feasible");
      out << fmt::format("margins at f_N = {:.2f} N, v = {:.4f} m/s, a = {:.4f} m/s^2:\n", at.f_N, p.v_max, p.a_max);
      const std::pair<const char*, const ConstraintCheck*> rows[] = {
          {"a", &r.cond_a}, {"b", &r.cond_b}, {"c", &r.cond_c}, {"d", &r.cond_d}};
      for (const auto& [name, c] : rows) {
        out << fmt::format("  ({}) {:4}  demand {:10.6f}  bound {:10.6f}  margin {:10.6f}  [{}]\n", name,
                           c->pass ? "pass" : "FAIL", c->demand, c->bound, c->margin, c->binding);
      }
    }

    if (config.output_dir) {
      const fs::path dir = output_dir(config);
      open_output(dir / "feasibility.json") << report.dump(2) << '\n';
      if (config.sweep_axis) {
        const SweepAxis axis = parse_sweep_axis(*config.sweep_axis);
        const auto rows = sweep(p, axis, config.sweep_from, config.sweep_to, config.sweep_samples,
                                OperatingPoint::from_params(p));
        auto csv = open_output(dir / fmt::format("sweep_{}.csv", to_string(axis)));
        write_sweep_csv(csv, axis, rows);
      }
    } else if (config.sweep_axis) {
      throw InputError("--sweep needs --out");
    }
    return fi.empty ? kExitNegative : kExitOk;
  });
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!config.mission_path) throw InputError("simulate needs --mission");
    const ParameterSet p = load_params(config);
    const MissionSpec mission = load_mission(config);
    const MissionResult result = run_mission(mission, p);
    const fs::path dir = output_dir(config);
    const fs::path file = dir / (config.format == Format::Json ? "trajectory.json" : "trajectory.csv");
    {
      auto os = open_output(file);
      if (config.format == Format::Json) write_trajectory_json(os, result.trajectory);
      else write_trajectory_csv(os, result.trajectory);
    }
    out << fmt::format("{}/{} waypoints reached at t = {:.2f} s ({} steps, {} constraint events){}\n",
                       result.waypoints_reached, mission.waypoints.size(), result.trajectory.back().t,
                       result.trajectory.size() - 1, count_events(result.trajectory),
                       result.timed_out ? ", TIMED OUT" : "");
    out << "wrote " << file.string() << '\n';
    return result.timed_out ? kExitNegative : kExitOk;
  });
}

int cmd_scan(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!config.plate_path) throw InputError("scan needs --plate");
    if (!config.mission_path == !config.trajectory_path) throw InputError("scan needs exactly one of --mission or --trajectory");
    const ParameterSet p = load_params(config);
    const MaterialPlate plate = load_plate(*config.plate_path);

    ScanSettings settings;
    std::vector<SimState> traj;
    bool timed_out = false;
    if (config.mission_path) {
      json raw;
      const MissionSpec mission = load_mission(config, &raw);
      if (raw.contains("scan")) settings = scan_settings_from_json(raw["scan"]);
      MissionResult result = run_mission(mission, p);
      timed_out = result.timed_out;
      traj = std::move(result.trajectory);
    } else {
      traj = read_trajectory_csv(*config.trajectory_path);
    }
    const double dt = config.dt.value_or(traj.size() > 1 ? traj[1].t - traj[0].t : 0.01);
    if (!(dt > 0)) throw InputError("cannot infer a positive time step from the trajectory");
    const auto interval = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(1.0 / (settings.sample_hz * dt))));

    UtConfig ut;
    ut.snr_db = settings.snr_db;
    ut.liftoff_max = p.liftoff_max;
    const auto records = scan_trajectory(traj, plate, settings.liftoff, interval, config.seed, ut);
    const CScanGeometry geometry{plate.width(), plate.height(), settings.cell_size.value_or(plate.cell_size())};
    const CScanGrid grid = assemble_cscan(records, geometry, settings.aggregation);
    const BScanLine bscan = assemble_bscan(records);

    const fs::path dir = output_dir(config);
    {
      auto os = open_output(dir / (config.format == Format::Json ? "records.json" : "records.csv"));
      if (config.format == Format::Json) write_records_json(os, records);
      else write_records_csv(os, records);
    }
    {
      auto os = open_output(dir / "bscan.csv");
      write_bscan_csv(os, bscan);
    }
    {
      auto os = open_output(dir / "cscan.csv");
      write_cscan_csv(os, grid);
    }
    const double nominal_mm = plate.nominal_thickness() * 1e3;
    {
      auto os = open_output(dir / "cscan.pgm", true);
      write_cscan_pgm(os, grid, 0.7 * nominal_mm, 1.1 * nominal_mm);
    }
    // The first A-scan actually taken, regenerated from its seed.
    for (std::size_t k = 0; k < traj.size(); k += interval) {
      if (!plate.contains(traj[k].pos)) continue;
      auto os = open_output(dir / "ascan_sample.csv");
      write_ascan_csv(os, synthesize_ascan(plate, traj[k].pos, settings.liftoff, derive_seed(config.seed, k), ut));
      break;
    }

    std::size_t estimated = 0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : records) {
      if (!r.thickness) continue;
      ++estimated;
      lo = std::min(lo, *r.thickness);
      hi = std::max(hi, *r.thickness);
    }
    out << fmt::format("{} A-scans ({} with thickness), C-scan coverage {:.1f}% of {}x{} cells\n", records.size(),
                       estimated, 100.0 * grid.coverage(), grid.nx(), grid.ny());
    if (estimated) out << fmt::format("thickness range {:.3f} .. {:.3f} mm\n", lo * 1e3, hi * 1e3);
    out << "wrote " << dir.string() << "/{records,bscan,cscan}.* and cscan.pgm\n";
    if (timed_out) out << "mission TIMED OUT; scan covers the partial trajectory\n";
    return timed_out ? kExitNegative : kExitOk;
  });
}

int cmd_serve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ParameterSet p = load_params(config);
    MaterialPlate plate = config.plate_path ? load_plate(*config.plate_path) : demo_plate();
    if (config.static_dir && !fs::is_directory(*config.static_dir)) {
      throw InputError("static directory '" + config.static_dir->string() + "' does not exist");
    }
    teleop::TeleopOptions options;
    options.dt = config.dt.value_or(0.01);
    options.seed = config.seed;
    auto sim = std::make_shared<teleop::TeleopSimulation>(p, std::move(plate), options);
    teleop::TeleopServer server(sim, {config.host, config.port, config.static_dir});
    unsigned short port = 0;
    try {
      port = server.start();
    } catch (const teleop::BindError& e) {
      throw InputError(e.what());
    }
    out << fmt::format("serving on http://{}:{}/ (websocket /teleop, health /healthz)", config.host, port) << std::endl;
    server.run(true);
    return kExitOk;
  });
}

void configure_logging() {
  auto logger = spdlog::get("omnislide");
  if (!logger) logger = spdlog::stderr_color_mt("omnislide");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("OMNISLIDE_LOG");
  const std::string level = env ? env : "info";
  const auto parsed = spdlog::level::from_str(level);
  // from_str maps unknown names to off; only accept that for an explicit "off".
  spdlog::set_level(parsed == spdlog::level::off && level != "off" ? spdlog::level::info : parsed);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Omni-sliding end-effector design envelope, simulation and UT scan toolkit", "omnislide"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  std::string params, plate, mission, trajectory, outdir, static_dir, format = "csv";
  app.add_option("--params", params, "Parameter set JSON (built-in defaults when omitted)");
  app.add_option("--plate", plate, "Material plate JSON");
  app.add_option("--mission", mission, "Mission JSON");
  app.add_option("--out", outdir, "Output directory");
  app.add_option("--dt", config.dt, "Simulation step, s")->check(CLI::PositiveNumber);
  app.add_option("--seed", config.seed, "Noise seed");
  app.add_option("--port", config.port, "Teleop listen port (0 = any free port)");
  app.add_option("--format", format, "Tabular output format")->check(CLI::IsMember({"csv", "json"}));

  auto* feas = app.add_subcommand("feasibility", "Feasible normal-force interval and constraint margins");
  std::string sweep;
  feas->add_option("--sweep", sweep, "Also write sweep_<axis>.csv to --out (f_N | a | mu_S | mass)");
  feas->add_option("--from", config.sweep_from, "Sweep start");
  feas->add_option("--to", config.sweep_to, "Sweep end");
  feas->add_option("--samples", config.sweep_samples, "Sweep sample count");

  auto* sim = app.add_subcommand("simulate", "Run a mission and write the trajectory");
  auto* scan = app.add_subcommand("scan", "Scan a plate along a mission or trajectory; write B/C-scans");
  scan->add_option("--trajectory", trajectory, "Trajectory CSV from `simulate` instead of --mission");
  auto* serve = app.add_subcommand("serve", "Start the teleop server");
  serve->add_option("--host", config.host, "Listen address");
  serve->add_option("--static", static_dir, "Directory of UI assets served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  auto opt_path = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };
  config.params_path = opt_path(params);
  config.plate_path = opt_path(plate);
  config.mission_path = opt_path(mission);
  config.trajectory_path = opt_path(trajectory);
  config.output_dir = opt_path(outdir);
  config.static_dir = opt_path(static_dir);
  config.format = format == "json" ? Format::Json : Format::Csv;
  if (!sweep.empty()) config.sweep_axis = sweep;

  if (feas->parsed()) return cmd_feasibility(config, out, err);
  if (sim->parsed()) return cmd_simulate(config, out, err);
  if (scan->parsed()) return cmd_scan(config, out, err);
  return cmd_serve(config, out, err);
}

}  // namespace omnislide::cli
