#include "omnislide/teleop/wire.hpp"

#include "omnislide/params_json.hpp"

#include <cmath>

namespace omnislide::teleop {
namespace {

using nlohmann::json;

double finite_field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw WireError(kErrMalformed, std::string("missing field '") + key + "'");
  if (!it->is_number()) throw WireError(kErrMalformed, std::string("field '") + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw WireError(kErrInvalidValue, std::string("field '") + key + "' must be finite");
  return v;
}

std::size_t index_field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || !it->is_number_unsigned()) {
    throw WireError(kErrMalformed, std::string("scan cell needs a non-negative integer '") + key + "'");
  }
  return it->get<std::size_t>();
}

}  // namespace

ClientMessage parse_client_message(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error&) {
    throw WireError(kErrMalformed, "frame is not valid JSON");
  }
  if (!doc.is_object()) throw WireError(kErrMalformed, "frame must be a JSON object");
  const auto type = doc.find("type");
  if (type == doc.end() || !type->is_string()) throw WireError(kErrMalformed, "frame needs a string 'type'");

  const auto& name = type->get_ref<const std::string&>();
  if (name == "cmd_vel") return CmdVel{finite_field(doc, "vx"), finite_field(doc, "vy")};
  if (name == "set_force") {
    const double f = finite_field(doc, "f_N");
    if (f < 0) throw WireError(kErrInvalidValue, "f_N must not be negative");
    return SetForce{f};
  }
  if (name == "reset") return Reset{};
  throw WireError(kErrUnknownType, "unknown message type '" + name + "'");
}

json config_frame(const ConfigInfo& info) {
  const MaterialPlate& plate = *info.plate;
  return {
      {"type", "config"},
      {"plate",
       {{"width", plate.width()},
        {"height", plate.height()},
        {"cell_size", plate.cell_size()},
        {"nx", plate.nx()},
        {"ny", plate.ny()},
        {"nominal_thickness_mm", plate.nominal_thickness() * 1e3}}},
      {"params", parameters_to_json(info.params)},
      {"params_digest", parameters_digest(info.params)},
      {"force_range", {info.force_range.f_low, info.force_range.f_up}},
      {"force_range_empty", info.force_range.empty},
      {"v_max", info.params.v_max},
      {"a_max", info.params.a_max},
      {"dt", info.dt},
      {"rate_hz", info.rate_hz},
      {"start", {info.start.x(), info.start.y()}},
      {"in_control", info.in_control},
  };
}

json state_frame(const SimState& s, const std::vector<SimEvent>& events) {
  json ev = json::array();
  for (const auto& e : events) ev.push_back({{"t", e.t}, {"kind", to_string(e.kind)}, {"detail", e.detail}});
  return {
      {"type", "state"},
      {"t", s.t},
      {"x", s.pos.x()},
      {"y", s.pos.y()},
      {"vx", s.vel.vx},
      {"vy", s.vel.vy},
      {"ax", s.acc.x()},
      {"ay", s.acc.y()},
      {"u", {s.motor.u1, s.motor.u2, s.motor.u3}},
      {"f_N", s.f_N_cmd},
      {"margins", {{"b", s.constraint.cond_b.margin}, {"c", s.constraint.cond_c.margin}, {"d", s.constraint.cond_d.margin}}},
      {"disturbance_torque", s.disturbance_torque},
      {"events", ev},
  };
}

json scan_delta_frame(const std::vector<ScanCell>& cells) {
  json arr = json::array();
  for (const auto& c : cells) {
    arr.push_back({{"i", c.i}, {"j", c.j}, {"thickness_mm", c.thickness_mm}, {"count", c.count}});
  }
  return {{"type", "scan_delta"}, {"cells", arr}};
}

json control_frame(bool in_control) { return {{"type", "control"}, {"in_control", in_control}}; }

json error_frame(const std::string& code, const std::string& message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

std::vector<ScanCell> grid_cells(const CScanGrid& grid) {
  std::vector<ScanCell> out;
  for (std::size_t j = 0; j < grid.ny(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      if (const auto v = grid.value(i, j)) out.push_back({i, j, *v * 1e3, grid.count(i, j)});
    }
  }
  return out;
}

void ScanReplay::apply(const json& frame) {
  if (!frame.is_object() || frame.value("type", "") != "scan_delta" || !frame.contains("cells") ||
      !frame["cells"].is_array()) {
    throw WireError(kErrMalformed, "not a scan_delta frame");
  }
  for (const auto& c : frame["cells"]) {
    if (!c.is_object()) throw WireError(kErrMalformed, "scan cell must be an object");
    ScanCell cell{index_field(c, "i"), index_field(c, "j"), finite_field(c, "thickness_mm"), index_field(c, "count")};
    cells_[{cell.j, cell.i}] = cell;
  }
}

std::vector<ScanCell> ScanReplay::cells() const {
  std::vector<ScanCell> out;
  for (const auto& [key, cell] : cells_) {
    if (cell.count > 0) out.push_back(cell);
  }
  return out;
}

}  // namespace omnislide::teleop
