#include "omnislide/envelope.hpp"

#include "omnislide/contact.hpp"
#include "omnislide/dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace omnislide {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConstraintCheck make_check(double demand, double bound, std::string binding) {
  return {demand <= bound, demand, bound, bound - demand, std::move(binding)};
}

/// Largest x in [lo, hi] with pred(x), assuming pred holds on an interval
/// ending at the answer. Scans down from hi in `coarse` steps, then bisects.
std::optional<double> supremum(const std::function<bool(double)>& pred, double lo, double hi, double coarse,
                               double resolution) {
  if (pred(hi)) return hi;
  double fail = hi;
  std::optional<double> pass;
  for (double x = hi - coarse;; x -= coarse) {
    x = std::max(x, lo);
    if (pred(x)) {
      pass = x;
      break;
    }
    fail = x;
    if (x <= lo) break;
  }
  if (!pass) return std::nullopt;
  double good = *pass;
  double bad = fail;
  while (bad - good > resolution) {
    const double mid = 0.5 * (good + bad);
    (pred(mid) ? good : bad) = mid;
  }
  return good;
}

const ConstraintCheck& pick(const ConstraintReport& r, char which) {
  switch (which) {
    case 'a': return r.cond_a;
    case 'b': return r.cond_b;
    case 'c': return r.cond_c;
    case 'd': return r.cond_d;
  }
  throw std::invalid_argument(std::string("unknown constraint '") + which + "'");
}

ConstraintReport evaluate_on_axis(const ParameterSet& params, SweepAxis axis, double value,
                                  const OperatingPoint& base) {
  ParameterSet p = params;
  OperatingPoint op = base;
  switch (axis) {
    case SweepAxis::NormalForce:
      op.f_N = value;
      break;
    case SweepAxis::Acceleration: {
      const double n = base.acceleration.norm();
      const Vec2 dir = n > 0 ? Vec2(base.acceleration / n) : Vec2::UnitX();
      op.acceleration = value * dir;
      break;
    }
    case SweepAxis::StaticFriction:
      p.mu_static = value;
      break;
    case SweepAxis::Mass:
      p.system_mass = value;
      break;
  }
  return evaluate_constraints(op.f_N, op.velocity, op.acceleration, p);
}

std::string num(double v) { return fmt::format("{:.6f}", v); }

}  // namespace

bool ConstraintReport::slip_bound_binding() const { return cond_b.binding == "mu_S*|f_N|"; }

ConstraintReport evaluate_constraints(double f_N_mag, const EEVelocity& velocity, const Vec2& acceleration,
                                      const ParameterSet& params, const Vec2& h_lin) {
  ConstraintReport r;

  const double mu_ratio = params.mu_rolling > 0 ? params.mu_static / params.mu_rolling : kInf;
  r.cond_a = make_check(params.dominance_ratio, mu_ratio, "mu_S/mu_R");

  const Vec3 f_R3 = rolling_resistance(f_N_mag, velocity.vec(), params);
  const Vec2 f_R{f_R3.x(), f_R3.y()};
  const Vec2 inertial = params.system_mass * acceleration;
  const double motor = motor_force_bound(params);
  const double traction = params.mu_static * f_N_mag;
  r.cond_b = make_check((inertial + h_lin - f_R).norm(), std::min(motor, traction),
                        traction <= motor ? "mu_S*|f_N|" : "eta*tau_w_max/R_w");

  r.cond_c = make_check(f_N_mag, params.f_max, "f_max");

  const double l_w = lever_arm_lw(params).norm();
  r.cond_d = make_check((inertial.norm() + h_lin.norm()) * l_w, params.Gamma_max, "Gamma_max");
  return r;
}

FeasibleInterval feasible_force_interval(double v_max, double a_max, const ParameterSet& params,
                                         double hardware_cap) {
  const EEVelocity v{v_max, 0.0};
  const Vec2 a{a_max, 0.0};
  FeasibleInterval out;
  out.f_low = params.f_min_contact;

  const auto all_pass = [&](double f) { return evaluate_constraints(f, v, a, params).feasible(); };
  out.constraint_sup = supremum(all_pass, 0.0, params.f_max, 0.5, kBisectionResolution);

  const auto b_pass = [&](double f) { return evaluate_constraints(f, v, a, params).cond_b.pass; };
  if (params.mu_rolling <= 0) {
    // Demand no longer grows with |f_N|; once traction suffices, (b) holds for all larger forces.
    out.analytic_b_bound = kInf;
  } else {
    const double b_hi = (motor_force_bound(params) + params.system_mass * a_max) / params.mu_rolling + 1.0;
    out.analytic_b_bound = supremum(b_pass, 0.0, b_hi, b_hi / 1000.0, kBisectionResolution);
  }

  if (!out.constraint_sup) {
    out.f_up = 0.0;
    out.empty = true;
    return out;
  }
  out.f_up = std::min({hardware_cap, params.f_max, *out.constraint_sup});
  out.empty = out.f_low > out.f_up;
  return out;
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::NormalForce: return "f_N";
    case SweepAxis::Acceleration: return "a";
    case SweepAxis::StaticFriction: return "mu_S";
    case SweepAxis::Mass: return "mass";
  }
  return "?";
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "f_N") return SweepAxis::NormalForce;
  if (name == "a") return SweepAxis::Acceleration;
  if (name == "mu_S") return SweepAxis::StaticFriction;
  if (name == "mass") return SweepAxis::Mass;
  throw std::invalid_argument("unknown sweep axis '" + name + "' (expected f_N, a, mu_S or mass)");
}

OperatingPoint OperatingPoint::from_params(const ParameterSet& params) {
  return {params.f_reference, {params.v_max, 0.0}, {params.a_max, 0.0}};
}

std::vector<SweepRow> sweep(const ParameterSet& params, SweepAxis axis, double lo, double hi, std::size_t samples,
                            const OperatingPoint& base) {
  if (samples == 0) throw std::invalid_argument("sweep: sample count must be positive");
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw std::invalid_argument("sweep: invalid range");
  std::vector<SweepRow> rows;
  rows.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double value = samples == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    rows.push_back({value, evaluate_on_axis(params, axis, value, base)});
  }
  return rows;
}

std::optional<double> find_threshold(const ParameterSet& params, SweepAxis axis, double lo, double hi, char which,
                                     const OperatingPoint& base, double resolution) {
  if (!(resolution > 0)) throw std::invalid_argument("find_threshold: resolution must be positive");
  const auto state = [&](double x) { return pick(evaluate_on_axis(params, axis, x, base), which).pass; };
  const bool at_lo = state(lo);
  if (at_lo == state(hi)) return std::nullopt;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (state(mid) == at_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void write_sweep_csv(std::ostream& os, SweepAxis axis, const std::vector<SweepRow>& rows) {
  os << to_string(axis)
     << ",feasible,pass_a,margin_a,pass_b,demand_b,bound_b,margin_b,binding_b,pass_c,margin_c,pass_d,demand_d,margin_d\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    os << num(row.value) << ',' << int(r.feasible()) << ',' << int(r.cond_a.pass) << ',' << num(r.cond_a.margin) << ','
       << int(r.cond_b.pass) << ',' << num(r.cond_b.demand) << ',' << num(r.cond_b.bound) << ','
       << num(r.cond_b.margin) << ',' << r.cond_b.binding << ',' << int(r.cond_c.pass) << ','
       << num(r.cond_c.margin) << ',' << int(r.cond_d.pass) << ',' << num(r.cond_d.demand) << ','
       << num(r.cond_d.margin) << '\n';
  }
}

}  // namespace omnislide
