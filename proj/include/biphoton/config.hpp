#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "biphoton/errors.hpp"
#include "biphoton/io.hpp"
#include "biphoton/scenario.hpp"

namespace biphoton {

/// Flat INI-style scenario configuration. Sections mirror the library modules;
/// every key is optional and defaults to the ScenarioConfig initializers.
/// Unknown sections or keys are rejected so typos cannot silently change runs.
///
/// [scenario] type, wavelength_nm, mode, hwp_theta_rad
/// [scan] delta_l_min_nm, delta_l_max_nm, n_points, integration_s
/// [detection] pair_rate_hz, seed, normalization, background_rate_hz
/// [hole_array] transmittance, birefringence_beta_rad, period_nm,
///              hole_diameter_nm, film_thickness_nm, cov_{hh,hv,vv}_{hh,hv,vv}
/// [fit] free_period, grid_min_nm, grid_max_nm, grid_step_nm
inline ScenarioConfig parse_scenario_config(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  std::string section;
  std::size_t lineno = 0;

  const auto cov_index = [](std::string_view name) -> int {
    if (name == "hh") return 0;
    if (name == "hv") return 1;
    if (name == "vv") return 2;
    return -1;
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = io::trim(line);
    if (view.empty() || view.front() == '#' || view.front() == ';') continue;
    if (view.front() == '[') {
      if (view.back() != ']') throw parse_error("unterminated section header", lineno);
      section = std::string(io::trim(view.substr(1, view.size() - 2)));
      if (section != "scenario" && section != "scan" && section != "detection" &&
          section != "hole_array" && section != "fit")
        throw parse_error("unknown section [" + section + "]", lineno);
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw parse_error("expected key = value", lineno);
    const std::string key{io::trim(view.substr(0, eq))};
    const std::string value{io::trim(view.substr(eq + 1))};
    if (section.empty()) throw parse_error("key outside any section", lineno);

    const auto as_double = [&]() { return io::parse_double_or_throw(value, lineno, key.c_str()); };
    const auto as_bool = [&]() {
      if (value == "true") return true;
      if (value == "false") return false;
      throw parse_error("expected true/false for " + key, lineno);
    };

    if (section == "scenario") {
      if (key == "type") {
        if (value == "no_plate") cfg.scenario = Scenario::no_plate;
        else if (value == "plate_hwp_first") cfg.scenario = Scenario::plate_hwp_first;
        else if (value == "plate_hwp_after") cfg.scenario = Scenario::plate_hwp_after;
        else throw parse_error("unknown scenario type '" + value + "'", lineno);
      } else if (key == "wavelength_nm") cfg.wavelength_nm = as_double();
      else if (key == "mode") {
        if (value == "analytic") cfg.mode = RunMode::analytic;
        else if (value == "mc") cfg.mode = RunMode::monte_carlo;
        else throw parse_error("mode must be analytic or mc", lineno);
      } else if (key == "hwp_theta_rad") cfg.hwp_theta_rad = as_double();
      else throw parse_error("unknown key '" + key + "' in [scenario]", lineno);
    } else if (section == "scan") {
      if (key == "delta_l_min_nm") cfg.scan.delta_l_min_nm = as_double();
      else if (key == "delta_l_max_nm") cfg.scan.delta_l_max_nm = as_double();
      else if (key == "n_points") cfg.scan.n_points = static_cast<int>(as_double());
      else if (key == "integration_s") cfg.integration_s = as_double();
      else throw parse_error("unknown key '" + key + "' in [scan]", lineno);
    } else if (section == "detection") {
      if (key == "pair_rate_hz") cfg.detection.pair_rate_hz = as_double();
      else if (key == "seed") {
        std::uint64_t seed;
        if (!io::try_parse_u64(value, seed)) throw parse_error("seed must be a u64", lineno);
        cfg.detection.seed = seed;
      } else if (key == "normalization") {
        if (value == "paper") cfg.detection.normalization = Normalization::paper;
        else if (value == "physical") cfg.detection.normalization = Normalization::physical;
        else throw parse_error("normalization must be paper or physical", lineno);
      } else if (key == "background_rate_hz") cfg.detection.background_rate_hz = as_double();
      else throw parse_error("unknown key '" + key + "' in [detection]", lineno);
    } else if (section == "hole_array") {
      if (key == "transmittance") cfg.hole_array.transmittance_t = as_double();
      else if (key == "birefringence_beta_rad") cfg.hole_array.birefringence_beta = as_double();
      else if (key == "period_nm") cfg.hole_array.period_nm = as_double();
      else if (key == "hole_diameter_nm") cfg.hole_array.hole_diameter_nm = as_double();
      else if (key == "film_thickness_nm") cfg.hole_array.film_thickness_nm = as_double();
      else if (key.size() == 9 && key.starts_with("cov_") && key[6] == '_') {
        const int a = cov_index(key.substr(4, 2));
        const int b = cov_index(key.substr(7, 2));
        if (a < 0 || b < 0) throw parse_error("unknown key '" + key + "' in [hole_array]", lineno);
        cfg.hole_array.dephasing_covariance[3 * a + b] = as_double();
        cfg.hole_array.dephasing_covariance[3 * b + a] =
            cfg.hole_array.dephasing_covariance[3 * a + b];
      } else throw parse_error("unknown key '" + key + "' in [hole_array]", lineno);
    } else {  // fit
      if (key == "free_period") cfg.fit.free_period = as_bool();
      else if (key == "grid_min_nm") cfg.fit.grid.min_nm = as_double();
      else if (key == "grid_max_nm") cfg.fit.grid.max_nm = as_double();
      else if (key == "grid_step_nm") cfg.fit.grid.step_nm = as_double();
      else throw parse_error("unknown key '" + key + "' in [fit]", lineno);
    }
  }
  return cfg;
}

inline std::string serialize_scenario_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  const auto d = [](double x) { return io::format_double(x); };
  out << "[scenario]\n";
  out << "type = " << scenario_name(cfg.scenario) << '\n';
  out << "wavelength_nm = " << d(cfg.wavelength_nm) << '\n';
  out << "mode = " << run_mode_name(cfg.mode) << '\n';
  out << "hwp_theta_rad = " << d(cfg.hwp_theta_rad) << '\n';
  out << "\n[scan]\n";
  out << "delta_l_min_nm = " << d(cfg.scan.delta_l_min_nm) << '\n';
  out << "delta_l_max_nm = " << d(cfg.scan.delta_l_max_nm) << '\n';
  out << "n_points = " << cfg.scan.n_points << '\n';
  out << "integration_s = " << d(cfg.integration_s) << '\n';
  out << "\n[detection]\n";
  out << "pair_rate_hz = " << d(cfg.detection.pair_rate_hz) << '\n';
  out << "seed = " << cfg.detection.seed << '\n';
  out << "normalization = " << normalization_name(cfg.detection.normalization) << '\n';
  out << "background_rate_hz = " << d(cfg.detection.background_rate_hz) << '\n';
  out << "\n[hole_array]\n";
  out << "transmittance = " << d(cfg.hole_array.transmittance_t) << '\n';
  out << "birefringence_beta_rad = " << d(cfg.hole_array.birefringence_beta) << '\n';
  out << "period_nm = " << d(cfg.hole_array.period_nm) << '\n';
  out << "hole_diameter_nm = " << d(cfg.hole_array.hole_diameter_nm) << '\n';
  out << "film_thickness_nm = " << d(cfg.hole_array.film_thickness_nm) << '\n';
  static constexpr const char* names[3] = {"hh", "hv", "vv"};
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b)
      out << "cov_" << names[a] << '_' << names[b] << " = "
          << d(cfg.hole_array.dephasing_covariance[3 * a + b]) << '\n';
  out << "\n[fit]\n";
  out << "free_period = " << (cfg.fit.free_period ? "true" : "false") << '\n';
  out << "grid_min_nm = " << d(cfg.fit.grid.min_nm) << '\n';
  out << "grid_max_nm = " << d(cfg.fit.grid.max_nm) << '\n';
  out << "grid_step_nm = " << d(cfg.fit.grid.step_nm) << '\n';
  return out.str();
}

}  // namespace biphoton
