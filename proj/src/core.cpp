#include "omnislide/core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace omnislide {

bool all_finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

bool all_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].field << ": " << violations[i].relation << " violated";
  }
  return os.str();
}

ValidationReport validate(const ParameterSet& p) {
  ValidationReport report;
  auto check = [&](bool holds, const char* field, const char* relation) {
    if (!holds) report.violations.push_back({field, relation});
  };
  auto finite = [&](double value, const char* field) {
    check(std::isfinite(value), field, "finite");
    return std::isfinite(value);
  };

  if (finite(p.wheel_radius, "wheel_radius")) check(p.wheel_radius > 0, "wheel_radius", "R_w > 0");
  if (finite(p.wheel_offset, "wheel_offset")) check(p.wheel_offset > 0, "wheel_offset", "d_W > 0");
  check(p.wheel_count == kWheelCount, "wheel_count", "wheel_count == 3");
  if (finite(p.safety_factor, "safety_factor")) {
    check(p.safety_factor > 0 && p.safety_factor < 1, "safety_factor", "0 < eta < 1");
  }
  if (finite(p.mu_rolling, "mu_rolling") && finite(p.mu_static, "mu_static")) {
    check(p.mu_rolling >= 0, "mu_rolling", "mu_R >= 0");
    check(p.mu_rolling < p.mu_static, "mu_rolling", "mu_R < mu_S");
  }
  if (finite(p.tau_w_max, "tau_w_max")) check(p.tau_w_max > 0, "tau_w_max", "tau_w_max > 0");
  if (finite(p.wheel_load_capacity, "wheel_load_capacity")) {
    check(p.wheel_load_capacity > 0, "wheel_load_capacity", "C_wheel > 0");
  }
  if (finite(p.f_max, "f_max")) check(p.f_max > 0, "f_max", "f_max > 0");
  if (finite(p.Gamma_max, "Gamma_max")) check(p.Gamma_max > 0, "Gamma_max", "Gamma_max > 0");
  if (finite(p.f_min_contact, "f_min_contact")) {
    check(p.f_min_contact >= 0, "f_min_contact", "f_min_contact >= 0");
    check(p.f_min_contact <= p.f_max, "f_min_contact", "f_min_contact <= f_max");
  }
  if (finite(p.system_mass, "system_mass")) check(p.system_mass > 0, "system_mass", "system_mass > 0");
  if (!all_finite(p.l_C)) {
    report.violations.push_back({"l_C", "finite"});
  } else {
    check(p.l_C.norm() > p.wheel_radius, "l_C", "|l_C| > R_w");
  }
  if (finite(p.v_max, "v_max")) check(p.v_max > 0, "v_max", "v_max > 0");
  if (finite(p.a_max, "a_max")) check(p.a_max > 0, "a_max", "a_max > 0");
  if (finite(p.compliance_budget, "compliance_budget")) {
    check(p.compliance_budget >= 0, "compliance_budget", "compliance_budget >= 0");
  }
  if (finite(p.liftoff_max, "liftoff_max")) check(p.liftoff_max > 0, "liftoff_max", "liftoff_max > 0");
  if (finite(p.dominance_ratio, "dominance_ratio")) {
    check(p.dominance_ratio >= 1, "dominance_ratio", "dominance_ratio >= 1");
  }
  // hardware_cap may be +inf (not measured) but never NaN or non-positive.
  check(!std::isnan(p.hardware_cap) && p.hardware_cap > 0, "hardware_cap", "hardware_cap > 0");
  if (finite(p.f_reference, "f_reference")) check(p.f_reference >= 0, "f_reference", "f_reference >= 0");
  check(all_finite(p.gravity_body), "gravity_body", "finite");
  check(all_finite(p.com_offset), "com_offset", "finite");
  return report;
}

void require_valid(const ParameterSet& params) {
  const auto report = validate(params);
  if (!report.ok()) throw std::invalid_argument("invalid parameters: " + report.summary());
}

}  // namespace omnislide
