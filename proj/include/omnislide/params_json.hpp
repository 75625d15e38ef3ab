#pragma once

#include "omnislide/core.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace omnislide {

/// Raised for malformed parameter, plate or mission files.
class FileFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat JSON object, SI units. Absent fields keep their built-in defaults,
/// unknown fields are rejected. "hardware_cap": null means unmeasured (+inf).
ParameterSet parameters_from_json(const nlohmann::json& doc);
nlohmann::json parameters_to_json(const ParameterSet& params);

ParameterSet load_parameters(const std::filesystem::path& path);

/// Hex FNV-1a digest of the canonical JSON form; identifies a parameter set on the wire.
std::string parameters_digest(const ParameterSet& params);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace omnislide
