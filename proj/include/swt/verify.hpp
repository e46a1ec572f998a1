#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swt/analysis.hpp"

namespace swt {

struct ConstantCheck {
  std::string name;
  double reference_value = 0.0;
  double computed_value = 0.0;
  double abs_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ConstantSpec {
  std::string name;
  double reference_value;
  double tolerance;  // one unit in the last printed digit, or 1e-9 for exact values
  std::function<double()> compute;
};

inline std::vector<ConstantSpec> constant_specs() {
  const auto det_lb = [] { return det_lb_value(0.6306655, 1.9896202).ratio; };
  const auto thresholds = [] { return solve_thresholds(); };
  return {
      {"threshold_ratio", 2.0, 1e-6, [] { return thresh_uniform_ratio(2.0 + 1e-9); }},
      {"det_lower_bound", 1.8546, 1e-4, det_lb},
      {"det_lower_bound_precise", 1.854628, 1e-6, det_lb},
      {"random_T", 1.7453, 1e-4, [] { return solve_random_params().T; }},
      {"random_E", 2.8609, 1e-4, [] { return solve_random_params().E; }},
      {"rand_lower_bound", 1.6257, 1e-4, [] { return maximize_rand_lb().value; }},
      {"rand_lower_bound_precise", 1.62575, 1e-5, [] { return maximize_rand_lb().value; }},
      {"q_star", 0.42265, 1e-5, [] { return maximize_rand_lb().x; }},
      {"combined_T1", 1.9338, 1e-4, [=] { return thresholds().T1; }},
      {"combined_T2", 2.2948, 1e-4, [=] { return thresholds().T2; }},
      {"ute_rho", 1.8668, 1e-4, ute_rho_fixpoint},
      {"ute_lb_instance_ratio", 1.8552, 1e-4, [] { return ute_ratio(1.9896, ute_rho_star()); }},
      {"ute_p_star", 2.7961, 1e-4, [] { return ute_p_star(ute_rho_fixpoint()); }},
      {"ute_beta_star", 0.2869, 1e-4, [] {
         const double rho = ute_rho_fixpoint();
         return ute_beta<double>(rho, rho);
       }},
      {"thresh_uniform_limit", std::sqrt(3.0), 1e-9, [] { return thresh_uniform_ratio(4.0); }},
      {"golden_ratio", 1.618, 1e-3, [] { return makespan_ratios().deterministic; }},
      {"makespan_rand_ratio", 4.0 / 3.0, 1e-9, [] { return makespan_ratios().randomized; }},
      {"makespan_rand_lower_bound", 4.0 / 3.0, 1e-9, [] { return makespan_ratios().randomized_lower_bound; }},
  };
}

/// Runs every solver and compares against the reference values. `overrides`
/// replaces reference values by name (unknown names throw).
inline std::vector<ConstantCheck> verify_constants(const std::map<std::string, double>& overrides = {}) {
  const auto specs = constant_specs();
  for (const auto& [name, value] : overrides) {
    bool known = false;
    for (const auto& s : specs) known = known || s.name == name;
    if (!known) throw std::invalid_argument("unknown constant '" + name + "'");
  }
  std::vector<ConstantCheck> out;
  for (const auto& s : specs) {
    ConstantCheck c;
    c.name = s.name;
    const auto it = overrides.find(s.name);
    c.reference_value = it == overrides.end() ? s.reference_value : it->second;
    c.computed_value = s.compute();
    c.abs_error = std::fabs(c.computed_value - c.reference_value);
    c.tolerance = s.tolerance;
    c.pass = c.abs_error <= c.tolerance;
    out.push_back(std::move(c));
  }
  return out;
}

inline nlohmann::json checks_to_json(const std::vector<ConstantCheck>& checks) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks) {
    out.push_back({{"name", c.name},
                   {"reference_value", c.reference_value},
                   {"computed_value", c.computed_value},
                   {"abs_error", c.abs_error},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}});
  }
  return out;
}

}  // namespace swt
