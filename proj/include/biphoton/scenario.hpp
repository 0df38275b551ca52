#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphoton/detection.hpp"
#include "biphoton/elements.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/fringe.hpp"
#include "biphoton/state.hpp"

namespace biphoton {

/// The three interferometer configurations.
///  - no_plate: |HV> -> HWP -> phase plate -> HWP -> detection
///  - plate_hwp_first: the HWP precedes the hole array, so the pair arrives as
///    (|HH> - |VV>)/sqrt(2)
///  - plate_hwp_after: the |HV> pair hits the hole array directly
enum class Scenario { no_plate, plate_hwp_first, plate_hwp_after };

enum class RunMode { analytic, monte_carlo };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::no_plate: return "no_plate";
    case Scenario::plate_hwp_first: return "plate_hwp_first";
    default: return "plate_hwp_after";
  }
}

inline const char* run_mode_name(RunMode m) {
  return m == RunMode::analytic ? "analytic" : "mc";
}

inline const char* normalization_name(Normalization n) {
  return n == Normalization::paper ? "paper" : "physical";
}

struct ScanRange {
  double delta_l_min_nm = 0.0;
  double delta_l_max_nm = 800.0;
  int n_points = 81;
};

struct FitOptions {
  bool free_period = false;
  PeriodGrid grid{};
};

struct ScenarioConfig {
  Scenario scenario = Scenario::no_plate;
  HoleArrayParams hole_array{};
  DetectionConfig detection{};
  ScanRange scan{};
  double wavelength_nm = 702.0;
  RunMode mode = RunMode::analytic;
  double integration_s = 1.0;
  double hwp_theta_rad = pi / 8.0;  ///< both half-wave plates; 22.5 degrees
  FitOptions fit{};

  void validate() const {
    if (scan.n_points < 4) throw validation_error("scan needs at least 4 points");
    if (!(scan.delta_l_max_nm > scan.delta_l_min_nm))
      throw validation_error("scan range must be nonzero");
    if (!(wavelength_nm > 0.0)) throw validation_error("wavelength must be positive");
    if (!(integration_s > 0.0)) throw validation_error("integration time must be positive");
    hole_array.validate();
    detection.validate();
  }
};

struct ScanRow {
  double delta_l_nm = 0.0;
  double rate_hv = 0.0;  ///< coincidence probability per pair
  double rate_hh = 0.0;
  std::uint64_t counts_hv = 0;  ///< filled in monte_carlo mode
  std::uint64_t counts_hh = 0;
};

struct ScanResult {
  Scenario scenario = Scenario::no_plate;
  RunMode mode = RunMode::analytic;
  Normalization normalization = Normalization::paper;
  std::uint64_t seed = 0;
  double wavelength_nm = 702.0;
  double integration_s = 1.0;
  std::vector<ScanRow> rows;
  std::optional<FringeFit> fit_hv;
  std::optional<FringeFit> fit_hh;
};

namespace detail {

/// Post-channel (post-selected) state entering the phase scan, and the elements
/// applied per scan point, for one scenario.
inline BiphotonDensityMatrix scan_input_state(const ScenarioConfig& cfg) {
  const JonesOperator half_wave = hwp(cfg.hwp_theta_rad);
  const BiphotonState source = make_hv_pair();
  switch (cfg.scenario) {
    case Scenario::no_plate:
      return to_density(apply_jones(half_wave, source));
    case Scenario::plate_hwp_first: {
      const BiphotonDensityMatrix through =
          hole_array_channel(cfg.hole_array, to_density(apply_jones(half_wave, source)));
      return post_select(through);
    }
    default: {  // plate_hwp_after
      const BiphotonDensityMatrix through =
          hole_array_channel(cfg.hole_array, to_density(source));
      return apply_jones(half_wave, post_select(through));
    }
  }
}

}  // namespace detail

/// Runs one scan: per point, the phase plate set to delta_phi(dL) and the final
/// half-wave plate are applied to the prepared state, then both coincidence
/// channels are read out. Monte Carlo mode additionally draws Poisson counts
/// (stream 2k for HV, 2k+1 for HH at scan index k, so evaluation order cannot
/// change the data). Fringe fits for both channels are attached; the HH channel
/// is reported against the C - A*cos(...) convention used for that readout, so
/// a plain interferometer reads phase 0 in both channels.
inline ScanResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();

  ScanResult result;
  result.scenario = cfg.scenario;
  result.mode = cfg.mode;
  result.normalization = cfg.detection.normalization;
  result.seed = cfg.detection.seed;
  result.wavelength_nm = cfg.wavelength_nm;
  result.integration_s = cfg.integration_s;

  const BiphotonDensityMatrix prepared = detail::scan_input_state(cfg);
  const JonesOperator half_wave = hwp(cfg.hwp_theta_rad);

  const int n = cfg.scan.n_points;
  result.rows.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    ScanRow row;
    row.delta_l_nm = cfg.scan.delta_l_min_nm +
                     (cfg.scan.delta_l_max_nm - cfg.scan.delta_l_min_nm) * k / (n - 1);
    const double dphi = delta_l_to_phase(row.delta_l_nm, cfg.wavelength_nm);
    const BiphotonDensityMatrix final_state =
        apply_jones(half_wave, apply_jones(phase_plate(dphi), prepared));
    row.rate_hv = pbs_coincidence_prob(final_state, cfg.detection.normalization);
    row.rate_hh = hh_coincidence_prob(final_state);
    if (cfg.mode == RunMode::monte_carlo) {
      const auto idx = static_cast<std::uint64_t>(k);
      row.counts_hv = sample_counts(row.rate_hv, cfg.detection, cfg.integration_s, 2 * idx);
      row.counts_hh = sample_counts(row.rate_hh, cfg.detection, cfg.integration_s, 2 * idx + 1);
    }
    result.rows.push_back(row);
  }

  std::vector<CurvePoint> hv, hh;
  hv.reserve(result.rows.size());
  hh.reserve(result.rows.size());
  for (const auto& row : result.rows) {
    if (cfg.mode == RunMode::monte_carlo) {
      hv.push_back({row.delta_l_nm, static_cast<double>(row.counts_hv)});
      hh.push_back({row.delta_l_nm, static_cast<double>(row.counts_hh)});
    } else {
      hv.push_back({row.delta_l_nm, row.rate_hv});
      hh.push_back({row.delta_l_nm, row.rate_hh});
    }
  }

  const FitWeighting weighting =
      cfg.mode == RunMode::monte_carlo ? FitWeighting::poisson : FitWeighting::uniform;
  const auto run_fit = [&](std::span<const CurvePoint> data) {
    return cfg.fit.free_period ? fit_free_period(data, cfg.fit.grid, weighting)
                               : fit_fixed_period(data, cfg.wavelength_nm, weighting);
  };
  result.fit_hv = run_fit(hv);
  result.fit_hh = run_fit(hh);
  if (result.fit_hh->model.phase_defined) {
    // 1 - cos convention for the HH readout.
    result.fit_hh->model.phase0 = canonical_phase(result.fit_hh->model.phase0 - pi);
  }
  return result;
}

/// Per-channel difference of the fitted phase offsets, canonicalized to
/// (-pi, pi], in radians and in units of pi.
struct CaseComparison {
  double hv_diff_rad = 0.0;
  double hh_diff_rad = 0.0;

  double hv_diff_over_pi() const { return hv_diff_rad / pi; }
  double hh_diff_over_pi() const { return hh_diff_rad / pi; }
};

inline CaseComparison compare_cases(const ScanResult& a, const ScanResult& b) {
  if (!a.fit_hv || !a.fit_hh || !b.fit_hv || !b.fit_hh)
    throw validation_error("compare_cases needs fits for both channels of both results");
  CaseComparison cmp;
  cmp.hv_diff_rad = canonical_phase(a.fit_hv->model.phase0 - b.fit_hv->model.phase0);
  cmp.hh_diff_rad = canonical_phase(a.fit_hh->model.phase0 - b.fit_hh->model.phase0);
  return cmp;
}

/// Analytic scans: delta_l_nm,rate_hv,rate_hh. Monte Carlo scans additionally
/// mirror the count-record table (delta_l_nm,counts_hv,counts_hh,integration_s).
inline void write_scan_csv(std::ostream& out, const ScanResult& result) {
  if (result.mode == RunMode::monte_carlo) {
    std::vector<CountRecord> records;
    records.reserve(result.rows.size());
    for (const auto& row : result.rows)
      records.push_back({row.delta_l_nm, row.counts_hv, row.counts_hh, result.integration_s});
    write_counts_csv(out, records);
    return;
  }
  out << "delta_l_nm,rate_hv,rate_hh\n";
  for (const auto& row : result.rows)
    out << io::format_double(row.delta_l_nm) << ',' << io::format_double(row.rate_hv) << ','
        << io::format_double(row.rate_hh) << '\n';
}

inline nlohmann::ordered_json scan_report_json(const ScanResult& result) {
  nlohmann::ordered_json doc;
  doc["scenario"] = scenario_name(result.scenario);
  doc["mode"] = run_mode_name(result.mode);
  doc["normalization"] = normalization_name(result.normalization);
  doc["seed"] = result.seed;
  doc["wavelength_nm"] = result.wavelength_nm;
  doc["n_points"] = result.rows.size();
  if (result.fit_hv) doc["fit_hv"] = fit_to_json(*result.fit_hv);
  if (result.fit_hh) doc["fit_hh"] = fit_to_json(*result.fit_hh);
  return doc;
}

}  // namespace biphoton
