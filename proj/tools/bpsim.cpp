// Command line front end: scenario scans, fringe fits, de Broglie readout, and
// the hole-array side calculations (resonances, classical baseline, spectra).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "biphoton/config.hpp"
#include "biphoton/detection.hpp"
#include "biphoton/fringe.hpp"
#include "biphoton/plasmon.hpp"
#include "biphoton/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw biphoton::validation_error("cannot open input file: " + path);
  return in;
}

std::vector<biphoton::CurvePoint> load_curve(const std::string& path, std::size_t x_col,
                                             std::size_t y_col) {
  auto in = open_input(path);
  auto points = biphoton::load_curve_csv(in, x_col, y_col);
  if (points.empty()) throw biphoton::validation_error("no data rows in " + path);
  return points;
}

void emit_json(const nlohmann::ordered_json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw biphoton::validation_error("cannot write " + out_path);
    out << text;
  }
}

struct ScanArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string normalization;
  bool free_period = false;
};

int run_scan(const ScanArgs& args) {
  auto in = open_input(args.config_path);
  biphoton::ScenarioConfig cfg = biphoton::parse_scenario_config(in);
  if (args.seed) cfg.detection.seed = *args.seed;
  if (args.mode == "analytic") cfg.mode = biphoton::RunMode::analytic;
  else if (args.mode == "mc") cfg.mode = biphoton::RunMode::monte_carlo;
  if (args.normalization == "paper") cfg.detection.normalization = biphoton::Normalization::paper;
  else if (args.normalization == "physical")
    cfg.detection.normalization = biphoton::Normalization::physical;
  if (args.free_period) cfg.fit.free_period = true;

  const biphoton::ScanResult result = biphoton::run_scenario(cfg);

  fs::create_directories(args.out_dir);
  const fs::path csv_path = fs::path(args.out_dir) / "scan.csv";
  const fs::path json_path = fs::path(args.out_dir) / "fits.json";
  {
    std::ofstream csv(csv_path);
    if (!csv) throw biphoton::validation_error("cannot write " + csv_path.string());
    biphoton::write_scan_csv(csv, result);
  }
  {
    std::ofstream json(json_path);
    if (!json) throw biphoton::validation_error("cannot write " + json_path.string());
    json << biphoton::scan_report_json(result).dump(2) << "\n";
  }
  std::cout << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";
  if (result.fit_hv)
    std::cout << "HV fit: phase0 = " << result.fit_hv->model.phase0 / biphoton::pi
              << " pi, period = " << result.fit_hv->model.period_nm
              << " nm, visibility = " << result.fit_hv->visibility << "\n";
  if (result.fit_hh)
    std::cout << "HH fit: phase0 = " << result.fit_hh->model.phase0 / biphoton::pi
              << " pi, period = " << result.fit_hh->model.period_nm
              << " nm, visibility = " << result.fit_hh->visibility << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon hole-array interference simulator"};
  app.require_subcommand(1);

  ScanArgs scan_args;
  auto* scan = app.add_subcommand("scan", "run a scenario scan, emit CSV + fit JSON");
  scan->add_option("--config", scan_args.config_path, "scenario config file")->required();
  scan->add_option("--out", scan_args.out_dir, "output directory");
  scan->add_option("--seed", scan_args.seed, "override RNG seed");
  scan->add_option("--mode", scan_args.mode, "analytic|mc")
      ->check(CLI::IsMember({"analytic", "mc"}));
  scan->add_option("--normalization", scan_args.normalization, "paper|physical")
      ->check(CLI::IsMember({"paper", "physical"}));
  scan->add_flag("--free-period", scan_args.free_period, "fit the fringe period as well");

  std::string fit_input, fit_out;
  std::size_t fit_x_col = 0, fit_y_col = 1;
  double fit_period = 702.0;
  bool fit_free = false, fit_poisson = false;
  biphoton::PeriodGrid fit_grid;
  auto* fit = app.add_subcommand("fit", "fit a fringe curve from a CSV file");
  fit->add_option("--input", fit_input, "curve CSV (delta_l_nm,value)")->required();
  fit->add_option("--x-col", fit_x_col, "x column index");
  fit->add_option("--y-col", fit_y_col, "y column index");
  fit->add_option("--period-nm", fit_period, "source wavelength; fringe repeats every half");
  fit->add_flag("--free", fit_free, "search the fringe period on a grid");
  fit->add_option("--grid-min", fit_grid.min_nm, "free-period grid minimum (nm)");
  fit->add_option("--grid-max", fit_grid.max_nm, "free-period grid maximum (nm)");
  fit->add_option("--grid-step", fit_grid.step_nm, "free-period grid step (nm)");
  fit->add_flag("--poisson-weights", fit_poisson, "weight points as raw counts");
  fit->add_option("--out", fit_out, "also write the fit JSON here");

  std::string db_input, db_out;
  std::size_t db_y_col = 1;
  biphoton::PeriodGrid db_grid;
  auto* debroglie = app.add_subcommand(
      "debroglie", "free-period fit; the fitted fringe period is the de Broglie wavelength");
  debroglie->add_option("--input", db_input, "curve CSV (delta_l_nm,value)")->required();
  debroglie->add_option("--y-col", db_y_col, "y column index");
  debroglie->add_option("--grid-min", db_grid.min_nm, "grid minimum (nm)");
  debroglie->add_option("--grid-max", db_grid.max_nm, "grid maximum (nm)");
  debroglie->add_option("--grid-step", db_grid.step_nm, "grid step (nm)");
  debroglie->add_option("--out", db_out, "also write the report JSON here");

  double res_period = 600.0;
  int res_max_order = 2;
  std::string res_constants;
  double res_eps_glass = 2.13, res_eps_air = 1.0;
  std::optional<double> res_query;
  auto* resonance = app.add_subcommand("resonance", "surface plasmon mode table for a geometry");
  resonance->add_option("--period", res_period, "lattice period (nm)");
  resonance->add_option("--max-order", res_max_order, "maximum grating order");
  resonance->add_option("--constants", res_constants, "metal permittivity CSV")->required();
  resonance->add_option("--eps-glass", res_eps_glass, "substrate dielectric constant");
  resonance->add_option("--eps-air", res_eps_air, "superstrate dielectric constant");
  resonance->add_option("--query", res_query, "report the mode nearest to this wavelength (nm)");

  double bethe_diameter = 200.0, bethe_wavelength = 702.0, bethe_period = 600.0;
  auto* bethe = app.add_subcommand("bethe", "classical small-hole transmission baseline");
  bethe->add_option("--diameter", bethe_diameter, "hole diameter (nm)");
  bethe->add_option("--wavelength", bethe_wavelength, "wavelength (nm)");
  bethe->add_option("--period", bethe_period, "lattice period (nm)");

  std::string spectrum_input;
  double spectrum_query = 702.0;
  std::optional<double> spectrum_classical;
  auto* spectrum = app.add_subcommand("spectrum", "query a measured transmittance spectrum");
  spectrum->add_option("--input", spectrum_input, "spectrum CSV")->required();
  spectrum->add_option("--query", spectrum_query, "wavelength to interpolate (nm)");
  spectrum->add_option("--classical", spectrum_classical,
                       "classical baseline for the enhancement ratio");

  CLI11_PARSE(app, argc, argv);

  try {
    if (scan->parsed()) return run_scan(scan_args);

    if (fit->parsed()) {
      const auto data = load_curve(fit_input, fit_x_col, fit_y_col);
      const auto weighting =
          fit_poisson ? biphoton::FitWeighting::poisson : biphoton::FitWeighting::uniform;
      const biphoton::FringeFit result =
          fit_free ? biphoton::fit_free_period(data, fit_grid, weighting)
                   : biphoton::fit_fixed_period(data, fit_period, weighting);
      emit_json(biphoton::fit_to_json(result), fit_out);
      return 0;
    }

    if (debroglie->parsed()) {
      const auto data = load_curve(db_input, 0, db_y_col);
      const biphoton::FringeFit result = biphoton::fit_free_period(data, db_grid);
      nlohmann::ordered_json doc;
      doc["de_broglie_wavelength_nm"] = result.model.period_nm;
      doc["fit"] = biphoton::fit_to_json(result);
      emit_json(doc, db_out);
      return 0;
    }

    if (resonance->parsed()) {
      auto in = open_input(res_constants);
      biphoton::plasmon::OpticalConstants oc = biphoton::plasmon::load_optical_constants_csv(in);
      oc.eps_glass = res_eps_glass;
      oc.eps_air = res_eps_air;
      const auto table = biphoton::plasmon::mode_table(res_period, oc, res_max_order);
      std::cout << "i j interface wavelength_nm\n";
      for (const auto& entry : table) {
        std::cout << entry.mode.i << ' ' << entry.mode.j << ' '
                  << biphoton::plasmon::interface_name(entry.mode.interface_side) << ' ';
        if (entry.ok) std::cout << entry.wavelength_nm << '\n';
        else std::cout << "unsolved (" << entry.error << ")\n";
      }
      if (res_query) {
        const auto near =
            biphoton::plasmon::nearest_mode(*res_query, res_period, oc, res_max_order);
        std::cout << "nearest to " << *res_query << " nm: (" << near.mode.i << ','
                  << near.mode.j << ") " << biphoton::plasmon::interface_name(near.mode.interface_side)
                  << " at " << near.wavelength_nm << " nm, distance " << near.distance_nm
                  << " nm\n";
      }
      return 0;
    }

    if (bethe->parsed()) {
      std::cout << biphoton::plasmon::bethe_transmission(bethe_diameter, bethe_wavelength,
                                                         bethe_period)
                << "\n";
      return 0;
    }

    if (spectrum->parsed()) {
      auto in = open_input(spectrum_input);
      const auto spec = biphoton::plasmon::ingest_spectrum(in);
      const double t = biphoton::plasmon::transmittance_at(spec, spectrum_query);
      std::cout << "transmittance at " << spectrum_query << " nm: " << t << "\n";
      if (spectrum_classical)
        std::cout << "enhancement over classical " << *spectrum_classical << ": "
                  << biphoton::plasmon::enhancement_at(spec, spectrum_query, *spectrum_classical)
                  << "\n";
      return 0;
    }
  } catch (const biphoton::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const biphoton::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
