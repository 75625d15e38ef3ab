#include "omnislide/params_json.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>

namespace omnislide {
namespace {

using nlohmann::json;

double as_number(const json& value, const std::string& key) {
  if (!value.is_number()) throw FileFormatError("field '" + key + "' must be a number");
  return value.get<double>();
}

Vec3 as_vec3(const json& value, const std::string& key) {
  if (!value.is_array() || value.size() != 3) {
    throw FileFormatError("field '" + key + "' must be an array of 3 numbers");
  }
  return {as_number(value[0], key), as_number(value[1], key), as_number(value[2], key)};
}

using Setter = std::function<void(ParameterSet&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto scalar = [&t](const char* name, double ParameterSet::*member) {
      t[name] = [member](ParameterSet& p, const json& v, const std::string& k) { p.*member = as_number(v, k); };
    };
    scalar("wheel_radius", &ParameterSet::wheel_radius);
    scalar("wheel_offset", &ParameterSet::wheel_offset);
    scalar("mu_rolling", &ParameterSet::mu_rolling);
    scalar("mu_static", &ParameterSet::mu_static);
    scalar("safety_factor", &ParameterSet::safety_factor);
    scalar("tau_w_max", &ParameterSet::tau_w_max);
    scalar("wheel_load_capacity", &ParameterSet::wheel_load_capacity);
    scalar("f_max", &ParameterSet::f_max);
    scalar("Gamma_max", &ParameterSet::Gamma_max);
    scalar("f_min_contact", &ParameterSet::f_min_contact);
    scalar("system_mass", &ParameterSet::system_mass);
    scalar("v_max", &ParameterSet::v_max);
    scalar("a_max", &ParameterSet::a_max);
    scalar("compliance_budget", &ParameterSet::compliance_budget);
    scalar("liftoff_max", &ParameterSet::liftoff_max);
    scalar("dominance_ratio", &ParameterSet::dominance_ratio);
    scalar("f_reference", &ParameterSet::f_reference);
    t["wheel_count"] = [](ParameterSet& p, const json& v, const std::string& k) {
      if (!v.is_number_integer()) throw FileFormatError("field '" + k + "' must be an integer");
      p.wheel_count = v.get<int>();
    };
    t["hardware_cap"] = [](ParameterSet& p, const json& v, const std::string& k) {
      p.hardware_cap = v.is_null() ? std::numeric_limits<double>::infinity() : as_number(v, k);
    };
    t["l_C"] = [](ParameterSet& p, const json& v, const std::string& k) { p.l_C = as_vec3(v, k); };
    t["gravity_body"] = [](ParameterSet& p, const json& v, const std::string& k) { p.gravity_body = as_vec3(v, k); };
    t["com_offset"] = [](ParameterSet& p, const json& v, const std::string& k) { p.com_offset = as_vec3(v, k); };
    return t;
  }();
  return table;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

ParameterSet parameters_from_json(const json& doc) {
  if (!doc.is_object()) throw FileFormatError("parameter file must contain a JSON object");
  ParameterSet params;
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw FileFormatError("unknown parameter field '" + key + "'");
    it->second(params, value, key);
  }
  return params;
}

json parameters_to_json(const ParameterSet& p) {
  json doc = {
      {"wheel_radius", p.wheel_radius},
      {"wheel_offset", p.wheel_offset},
      {"wheel_count", p.wheel_count},
      {"mu_rolling", p.mu_rolling},
      {"mu_static", p.mu_static},
      {"safety_factor", p.safety_factor},
      {"tau_w_max", p.tau_w_max},
      {"wheel_load_capacity", p.wheel_load_capacity},
      {"f_max", p.f_max},
      {"Gamma_max", p.Gamma_max},
      {"f_min_contact", p.f_min_contact},
      {"system_mass", p.system_mass},
      {"l_C", vec_json(p.l_C)},
      {"v_max", p.v_max},
      {"a_max", p.a_max},
      {"compliance_budget", p.compliance_budget},
      {"liftoff_max", p.liftoff_max},
      {"dominance_ratio", p.dominance_ratio},
      {"f_reference", p.f_reference},
      {"gravity_body", vec_json(p.gravity_body)},
      {"com_offset", vec_json(p.com_offset)},
  };
  doc["hardware_cap"] = std::isinf(p.hardware_cap) ? json(nullptr) : json(p.hardware_cap);
  return doc;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FileFormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

ParameterSet load_parameters(const std::filesystem::path& path) {
  return parameters_from_json(read_json_file(path));
}

std::string parameters_digest(const ParameterSet& params) {
  const std::string canonical = parameters_to_json(params).dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, hash >>= 4) out[static_cast<std::size_t>(i)] = kHex[hash & 0xF];
  return out;
}

}  // namespace omnislide
