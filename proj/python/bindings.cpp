#include "omnislide/core.hpp"
#include "omnislide/envelope.hpp"
#include "omnislide/kinematics.hpp"
#include "omnislide/params_json.hpp"
#include "omnislide/sliding_sim.hpp"
#include "omnislide/ut_scan.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

namespace py = pybind11;
using namespace omnislide;

namespace {

// nlohmann -> Python through the json module; parameter sets are small.
py::object to_python(const nlohmann::json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

nlohmann::json from_python(const py::object& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::dict check_dict(const ConstraintCheck& c) {
  py::dict d;
  d["pass"] = c.pass;
  d["demand"] = c.demand;
  d["bound"] = c.bound;
  d["margin"] = c.margin;
  d["binding"] = c.binding;
  return d;
}

py::dict report_dict(const ConstraintReport& r) {
  py::dict d;
  d["a"] = check_dict(r.cond_a);
  d["b"] = check_dict(r.cond_b);
  d["c"] = check_dict(r.cond_c);
  d["d"] = check_dict(r.cond_d);
  d["feasible"] = r.feasible();
  return d;
}

py::array_t<double> column(const std::vector<SimState>& traj, double (*get)(const SimState&)) {
  py::array_t<double> out(static_cast<py::ssize_t>(traj.size()));
  auto w = out.mutable_unchecked<1>();
  for (std::size_t k = 0; k < traj.size(); ++k) w(static_cast<py::ssize_t>(k)) = get(traj[k]);
  return out;
}

py::dict trajectory_dict(const std::vector<SimState>& traj) {
  py::dict d;
  d["t"] = column(traj, [](const SimState& s) { return s.t; });
  d["x"] = column(traj, [](const SimState& s) { return s.pos.x(); });
  d["y"] = column(traj, [](const SimState& s) { return s.pos.y(); });
  d["vx"] = column(traj, [](const SimState& s) { return s.vel.vx; });
  d["vy"] = column(traj, [](const SimState& s) { return s.vel.vy; });
  d["ax"] = column(traj, [](const SimState& s) { return s.acc.x(); });
  d["ay"] = column(traj, [](const SimState& s) { return s.acc.y(); });
  d["u1"] = column(traj, [](const SimState& s) { return s.motor.u1; });
  d["u2"] = column(traj, [](const SimState& s) { return s.motor.u2; });
  d["u3"] = column(traj, [](const SimState& s) { return s.motor.u3; });
  d["f_N"] = column(traj, [](const SimState& s) { return s.f_N_cmd; });
  d["margin_b"] = column(traj, [](const SimState& s) { return s.constraint.cond_b.margin; });
  d["margin_c"] = column(traj, [](const SimState& s) { return s.constraint.cond_c.margin; });
  d["margin_d"] = column(traj, [](const SimState& s) { return s.constraint.cond_d.margin; });
  d["disturbance_torque"] = column(traj, [](const SimState& s) { return s.disturbance_torque; });
  d["residual"] = column(traj, [](const SimState& s) { return std::max(s.residual.linear, s.residual.angular); });
  py::list events;
  for (const auto& s : traj) {
    for (const auto& e : s.events) events.append(py::make_tuple(e.t, to_string(e.kind), e.detail));
  }
  d["events"] = events;
  return d;
}

py::array_t<double> grid_array(const CScanGrid& grid) {
  py::array_t<double> out({static_cast<py::ssize_t>(grid.ny()), static_cast<py::ssize_t>(grid.nx())});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t j = 0; j < grid.ny(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const auto v = grid.value(i, j);
      w(static_cast<py::ssize_t>(j), static_cast<py::ssize_t>(i)) =
          v ? *v * 1e3 : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

UtConfig ut_config(std::optional<double> snr_db) {
  UtConfig cfg;
  cfg.snr_db = snr_db;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Omni-sliding end-effector model, design envelope, simulator and UT scan synthesis";

  py::register_exception<FileFormatError>(m, "FileFormatError", PyExc_ValueError);

  py::class_<ParameterSet>(m, "ParameterSet")
      .def(py::init<>())
      .def_static("defaults", &ParameterSet::defaults)
      .def_static("from_dict", [](const py::object& d) { return parameters_from_json(from_python(d)); })
      .def_static("load", [](const std::string& path) { return load_parameters(path); })
      .def("to_dict", [](const ParameterSet& p) { return to_python(parameters_to_json(p)); })
      .def("digest", [](const ParameterSet& p) { return parameters_digest(p); })
      .def("validate",
           [](const ParameterSet& p) {
             py::list out;
             for (const auto& v : validate(p).violations) out.append(py::make_tuple(v.field, v.relation));
             return out;
           })
      .def_readwrite("wheel_radius", &ParameterSet::wheel_radius)
      .def_readwrite("wheel_offset", &ParameterSet::wheel_offset)
      .def_readwrite("mu_rolling", &ParameterSet::mu_rolling)
      .def_readwrite("mu_static", &ParameterSet::mu_static)
      .def_readwrite("safety_factor", &ParameterSet::safety_factor)
      .def_readwrite("tau_w_max", &ParameterSet::tau_w_max)
      .def_readwrite("wheel_load_capacity", &ParameterSet::wheel_load_capacity)
      .def_readwrite("f_max", &ParameterSet::f_max)
      .def_readwrite("Gamma_max", &ParameterSet::Gamma_max)
      .def_readwrite("f_min_contact", &ParameterSet::f_min_contact)
      .def_readwrite("system_mass", &ParameterSet::system_mass)
      .def_readwrite("l_C", &ParameterSet::l_C)
      .def_readwrite("v_max", &ParameterSet::v_max)
      .def_readwrite("a_max", &ParameterSet::a_max)
      .def_readwrite("compliance_budget", &ParameterSet::compliance_budget)
      .def_readwrite("liftoff_max", &ParameterSet::liftoff_max)
      .def_readwrite("dominance_ratio", &ParameterSet::dominance_ratio)
      .def_readwrite("hardware_cap", &ParameterSet::hardware_cap)
      .def_readwrite("f_reference", &ParameterSet::f_reference)
      .def_readwrite("gravity_body", &ParameterSet::gravity_body)
      .def_readwrite("com_offset", &ParameterSet::com_offset);

  m.def(
      "inverse_kinematics",
      [](double vx, double vy, const ParameterSet& p) {
        const auto u = inverse_kinematics({vx, vy}, p);
        return py::make_tuple(u.u1, u.u2, u.u3);
      },
      py::arg("vx"), py::arg("vy"), py::arg("params") = ParameterSet::defaults(),
      "Motor angular speeds (rad/s) for an end-effector velocity (m/s).");
  m.def(
      "forward_kinematics",
      [](double u1, double u2, double u3, const ParameterSet& p) {
        const auto r = forward_kinematics({u1, u2, u3}, p);
        return py::make_tuple(r.velocity.vx, r.velocity.vy, r.residual);
      },
      py::arg("u1"), py::arg("u2"), py::arg("u3"), py::arg("params") = ParameterSet::defaults(),
      "Least-squares velocity (vx, vy, residual) for three motor speeds.");
  m.def(
      "rate_limit",
      [](std::pair<double, double> cmd, std::pair<double, double> prev, double dt, const ParameterSet& p) {
        const auto v = rate_limit({cmd.first, cmd.second}, {prev.first, prev.second}, dt, p);
        return py::make_tuple(v.vx, v.vy);
      },
      py::arg("cmd"), py::arg("prev"), py::arg("dt"), py::arg("params") = ParameterSet::defaults());

  m.def(
      "evaluate_constraints",
      [](double f_N, std::pair<double, double> v, std::pair<double, double> a, const ParameterSet& p) {
        return report_dict(evaluate_constraints(f_N, {v.first, v.second}, Vec2(a.first, a.second), p));
      },
      py::arg("f_N"), py::arg("velocity"), py::arg("acceleration"), py::arg("params") = ParameterSet::defaults());
  m.def(
      "feasible_force_interval",
      [](const ParameterSet& p, std::optional<double> hardware_cap) {
        const auto fi = feasible_force_interval(p.v_max, p.a_max, p, hardware_cap.value_or(p.hardware_cap));
        py::dict d;
        d["f_low"] = fi.f_low;
        d["f_up"] = fi.f_up;
        d["empty"] = fi.empty;
        d["constraint_sup"] = fi.constraint_sup;
        return d;
      },
      py::arg("params") = ParameterSet::defaults(), py::arg("hardware_cap") = py::none(),
      "Feasible normal-force interval at (v_max, a_max); hardware_cap defaults to the parameter set's.");
  m.def(
      "sweep",
      [](const ParameterSet& p, const std::string& axis, double lo, double hi, std::size_t samples) {
        py::list rows;
        for (const auto& row : sweep(p, parse_sweep_axis(axis), lo, hi, samples, OperatingPoint::from_params(p))) {
          py::dict d = report_dict(row.report);
          d["value"] = row.value;
          rows.append(d);
        }
        return rows;
      },
      py::arg("params"), py::arg("axis"), py::arg("lo"), py::arg("hi"), py::arg("samples"));
  m.def(
      "find_threshold",
      [](const ParameterSet& p, const std::string& axis, double lo, double hi, char which, double resolution) {
        return find_threshold(p, parse_sweep_axis(axis), lo, hi, which, OperatingPoint::from_params(p), resolution);
      },
      py::arg("params"), py::arg("axis"), py::arg("lo"), py::arg("hi"), py::arg("condition"),
      py::arg("resolution") = kBisectionResolution);

  m.def(
      "run_mission",
      [](const std::vector<std::pair<double, double>>& waypoints, const ParameterSet& p, std::pair<double, double> start,
         double dt, double f_N, std::optional<double> timeout) {
        MissionSpec spec;
        for (const auto& [x, y] : waypoints) spec.waypoints.emplace_back(x, y);
        spec.start = {start.first, start.second};
        spec.dt = dt;
        spec.f_N = f_N;
        spec.timeout = timeout;
        MissionResult r;
        {
          py::gil_scoped_release release;
          r = run_mission(spec, p);
        }
        py::dict d = trajectory_dict(r.trajectory);
        d["waypoints_reached"] = r.waypoints_reached;
        d["timed_out"] = r.timed_out;
        return d;
      },
      py::arg("waypoints"), py::arg("params") = ParameterSet::defaults(),
      py::arg("start") = std::make_pair(0.0, 0.0), py::arg("dt") = 0.01, py::arg("f_N") = 10.0,
      py::arg("timeout") = py::none(), "Runs a waypoint mission; returns trajectory columns as numpy arrays.");
  m.def("lawnmower", [](double x0, double y0, double x1, double y1, double pitch) {
    std::vector<std::pair<double, double>> out;
    for (const auto& w : lawnmower(x0, y0, x1, y1, pitch)) out.emplace_back(w.x(), w.y());
    return out;
  });

  py::class_<MaterialPlate>(m, "MaterialPlate")
      .def_static("uniform", &MaterialPlate::uniform, py::arg("width"), py::arg("height"), py::arg("cell_size"),
                  py::arg("thickness"), py::arg("sound_speed") = 3230.0)
      .def_static("load", [](const std::string& path) { return load_plate(path); })
      .def_static("from_dict", [](const py::object& d) { return plate_from_json(from_python(d)); })
      .def("to_dict", [](const MaterialPlate& plate) { return to_python(plate_to_json(plate)); })
      .def("add_circular_defect",
           [](MaterialPlate& plate, std::pair<double, double> c, double r, double t) {
             plate.add_circular_defect({c.first, c.second}, r, t);
           })
      .def("thickness_at", [](const MaterialPlate& plate, double x, double y) { return plate.thickness_at({x, y}); })
      .def_property_readonly("width", &MaterialPlate::width)
      .def_property_readonly("height", &MaterialPlate::height)
      .def_property_readonly("cell_size", &MaterialPlate::cell_size)
      .def_property_readonly("sound_speed", &MaterialPlate::sound_speed)
      .def_property_readonly("nominal_thickness", &MaterialPlate::nominal_thickness)
      .def_property_readonly("shape", [](const MaterialPlate& p) { return py::make_tuple(p.ny(), p.nx()); });

  m.def(
      "synthesize_ascan",
      [](const MaterialPlate& plate, double x, double y, double liftoff, std::uint64_t seed,
         std::optional<double> snr_db) {
        const auto scan = synthesize_ascan(plate, {x, y}, liftoff, seed, ut_config(snr_db));
        py::dict d;
        d["samples"] = py::array_t<double>(static_cast<py::ssize_t>(scan.samples.size()), scan.samples.data());
        d["sample_rate"] = scan.sample_rate;
        d["valid"] = scan.valid;
        return d;
      },
      py::arg("plate"), py::arg("x"), py::arg("y"), py::arg("liftoff") = 0.0, py::arg("seed") = 1,
      py::arg("snr_db") = 30.0, "Synthetic two-echo A-scan; snr_db=None disables noise.");
  m.def(
      "estimate_thickness",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> samples, double sample_rate,
         double sound_speed, bool valid) {
        AScan scan;
        scan.sample_rate = sample_rate;
        scan.samples.assign(samples.data(), samples.data() + samples.size());
        scan.valid = valid;
        const auto est = estimate_thickness(scan, sound_speed, UtConfig{});
        return py::make_tuple(est.thickness, est.quality);
      },
      py::arg("samples"), py::arg("sample_rate") = 100e6, py::arg("sound_speed") = 3230.0, py::arg("valid") = true,
      "(thickness in m or None, quality in [0, 1]).");
  m.def(
      "scan_mission",
      [](const MaterialPlate& plate, const std::vector<std::pair<double, double>>& waypoints, const ParameterSet& p,
         std::pair<double, double> start, double cell_size, double liftoff, std::size_t sample_interval,
         std::uint64_t seed, std::optional<double> snr_db, const std::string& aggregation) {
        MissionSpec spec;
        for (const auto& [x, y] : waypoints) spec.waypoints.emplace_back(x, y);
        spec.start = {start.first, start.second};
        spec.bounds = {0.0, 0.0, plate.width(), plate.height()};
        const Aggregation agg = parse_aggregation(aggregation);
        CScanGrid grid({plate.width(), plate.height(), cell_size}, agg);
        std::vector<ScanRecord> records;
        bool timed_out = false;
        {
          py::gil_scoped_release release;
          const auto run = run_mission(spec, p);
          timed_out = run.timed_out;
          records = scan_trajectory(run.trajectory, plate, liftoff, sample_interval, seed, ut_config(snr_db));
          grid = assemble_cscan(records, grid.geometry(), agg);
        }
        py::dict d;
        d["cscan_mm"] = grid_array(grid);
        d["coverage"] = grid.coverage();
        d["records"] = records.size();
        d["timed_out"] = timed_out;
        return d;
      },
      py::arg("plate"), py::arg("waypoints"), py::arg("params") = ParameterSet::defaults(),
      py::arg("start") = std::make_pair(0.0, 0.0), py::arg("cell_size") = 0.01, py::arg("liftoff") = 0.001,
      py::arg("sample_interval") = 5, py::arg("seed") = 1, py::arg("snr_db") = 30.0,
      py::arg("aggregation") = "mean",
      "Mission -> A-scans -> C-scan; returns the grid in mm (NaN where no sample).");

  m.attr("__version__") = OMNISLIDE_VERSION_STRING;
}
