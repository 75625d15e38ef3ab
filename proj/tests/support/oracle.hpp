#pragma once

// Frozen expected values produced by tests/oracles/derive_fixtures.py.

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

namespace omnislide::fixtures {

inline const nlohmann::json& oracle() {
  static const nlohmann::json doc = [] {
    std::ifstream in(std::string(OMNISLIDE_FIXTURE_DIR) + "/oracle_values.json");
    if (!in) throw std::runtime_error("oracle_values.json not found");
    return nlohmann::json::parse(in);
  }();
  return doc;
}

inline double oracle_value(const char* group, const char* key) { return oracle().at(group).at(key).get<double>(); }

inline std::string config_path(const std::string& name) { return std::string(OMNISLIDE_CONFIG_DIR) + "/" + name; }

}  // namespace omnislide::fixtures
