#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/io.hpp"
#include "biphoton/linalg.hpp"

namespace biphoton::plasmon {

enum class Interface { metal_glass, metal_air };

inline const char* interface_name(Interface s) {
  return s == Interface::metal_glass ? "metal-glass" : "metal-air";
}

/// Grating order (i, j) on one interface of the square lattice.
struct ResonanceMode {
  int i = 1;
  int j = 0;
  Interface interface_side = Interface::metal_glass;

  ResonanceMode(int i_order, int j_order, Interface side)
      : i(i_order), j(j_order), interface_side(side) {
    if (i == 0 && j == 0) throw validation_error("resonance mode (0,0) is not a grating order");
  }

  int order2() const { return i * i + j * j; }

  /// Degenerate partners (sign flips, axis swap) share one representative with
  /// i >= j >= 0.
  ResonanceMode canonical() const {
    const int ai = std::abs(i), aj = std::abs(j);
    return {std::max(ai, aj), std::min(ai, aj), interface_side};
  }
};

struct OpticalConstantsRow {
  double wavelength_nm = 0.0;
  double eps_real = 0.0;
  double eps_imag = 0.0;
};

/// Tabulated metal permittivity plus the dielectric constants of the two
/// interface media. Metal values are linearly interpolated in wavelength.
struct OpticalConstants {
  std::vector<OpticalConstantsRow> rows;
  double eps_glass = 2.13;
  double eps_air = 1.0;

  void validate() const {
    if (rows.empty()) throw validation_error("optical constants table is empty");
    for (std::size_t k = 1; k < rows.size(); ++k)
      if (!(rows[k].wavelength_nm > rows[k - 1].wavelength_nm))
        throw validation_error("optical constants wavelengths must be strictly increasing");
  }

  double min_wavelength_nm() const { return rows.front().wavelength_nm; }
  double max_wavelength_nm() const { return rows.back().wavelength_nm; }

  bool in_range(double wl) const {
    return wl >= min_wavelength_nm() && wl <= max_wavelength_nm();
  }

  cplx eps_metal_at(double wl) const {
    if (!in_range(wl)) throw numeric_error("wavelength outside optical constants table");
    auto hi = std::lower_bound(rows.begin(), rows.end(), wl,
                               [](const OpticalConstantsRow& r, double w) {
                                 return r.wavelength_nm < w;
                               });
    if (hi == rows.begin()) return {hi->eps_real, hi->eps_imag};
    const auto lo = hi - 1;
    const double f = (wl - lo->wavelength_nm) / (hi->wavelength_nm - lo->wavelength_nm);
    return {lo->eps_real + f * (hi->eps_real - lo->eps_real),
            lo->eps_imag + f * (hi->eps_imag - lo->eps_imag)};
  }

  double eps_dielectric(Interface side) const {
    return side == Interface::metal_glass ? eps_glass : eps_air;
  }
};

/// CSV columns: wavelength_nm,eps_real,eps_imag. `#` comments and one header
/// row allowed.
inline OpticalConstants load_optical_constants_csv(std::istream& in) {
  OpticalConstants oc;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_comment_or_blank(line)) continue;
    const auto fields = io::split_fields(line);
    if (fields.size() != 3) throw parse_error("expected 3 columns", lineno);
    OpticalConstantsRow row;
    if (!io::try_parse_double(fields[0], row.wavelength_nm)) {
      if (!seen_data) continue;  // header
      throw parse_error("cannot parse wavelength", lineno);
    }
    row.eps_real = io::parse_double_or_throw(fields[1], lineno, "eps_real");
    row.eps_imag = io::parse_double_or_throw(fields[2], lineno, "eps_imag");
    oc.rows.push_back(row);
    seen_data = true;
  }
  oc.validate();
  return oc;
}

namespace detail {

/// Right-hand side of the momentum-matching relation:
/// lambda = (period / sqrt(i^2+j^2)) * Re sqrt(eps_m * eps_d / (eps_m + eps_d)).
inline double resonance_rhs(double wl, const ResonanceMode& mode, double period_nm,
                            const OpticalConstants& oc) {
  const cplx eps_m = oc.eps_metal_at(wl);
  const double eps_d = oc.eps_dielectric(mode.interface_side);
  const cplx denom = eps_m + eps_d;
  if (std::abs(denom) < 1e-9 * (std::abs(eps_m) + eps_d))
    throw numeric_error("surface plasmon dispersion singular: eps_metal + eps_dielectric ~ 0");
  const double factor = std::real(std::sqrt(eps_m * eps_d / denom));
  return period_nm / std::sqrt(static_cast<double>(mode.order2())) * factor;
}

}  // namespace detail

/// Momentum-matched resonance wavelength of one grating order, solved by damped
/// fixed-point iteration over the tabulated permittivity (bisection fallback).
/// Converged when the defining equation holds to better than 0.01 nm.
inline double resonance_wavelength(const ResonanceMode& mode, double period_nm,
                                   const OpticalConstants& oc) {
  if (!(period_nm > 0.0)) throw validation_error("lattice period must be positive");
  oc.validate();

  const double lo = oc.min_wavelength_nm(), hi = oc.max_wavelength_nm();
  const double tol_nm = 0.01;

  // Effective-index guess, clamped into the table.
  double wl = std::clamp(period_nm / std::sqrt(static_cast<double>(mode.order2())) *
                             std::sqrt(oc.eps_dielectric(mode.interface_side)),
                         lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double rhs = detail::resonance_rhs(wl, mode, period_nm, oc);
    if (std::abs(rhs - wl) < tol_nm) return wl;
    const double next = wl + 0.5 * (rhs - wl);  // damping 0.5
    if (next < lo || next > hi)
      throw numeric_error("no surface plasmon resonance inside the tabulated wavelength range");
    wl = next;
  }

  // Oscillating iteration: bisect the residual g(wl) = rhs(wl) - wl.
  const int n_scan = 256;
  double prev_wl = lo;
  double prev_g = detail::resonance_rhs(lo, mode, period_nm, oc) - lo;
  for (int k = 1; k <= n_scan; ++k) {
    const double x = lo + (hi - lo) * k / n_scan;
    const double g = detail::resonance_rhs(x, mode, period_nm, oc) - x;
    if (prev_g == 0.0) return prev_wl;
    if ((prev_g < 0.0) != (g < 0.0)) {
      double a = prev_wl, b = x, ga = prev_g;
      while (b - a > 1e-4) {
        const double mid = 0.5 * (a + b);
        const double gm = detail::resonance_rhs(mid, mode, period_nm, oc) - mid;
        if ((gm < 0.0) == (ga < 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    prev_wl = x;
    prev_g = g;
  }
  throw numeric_error("no surface plasmon resonance inside the tabulated wavelength range");
}

struct ModeResonance {
  ResonanceMode mode;
  double wavelength_nm = 0.0;  ///< valid when ok
  bool ok = false;
  std::string error;
};

/// Resonances of all canonical modes with i^2 + j^2 <= max_order^2 on both
/// interfaces, ordered by increasing order, metal-glass first. Modes whose
/// solve fails are kept with their error message.
inline std::vector<ModeResonance> mode_table(double period_nm, const OpticalConstants& oc,
                                             int max_order) {
  if (max_order < 1) throw validation_error("max_order must be at least 1");
  std::vector<ModeResonance> table;
  for (int n2 = 1; n2 <= max_order * max_order; ++n2) {
    for (int i = 1; i * i <= n2; ++i) {
      const int jj = n2 - i * i;
      const int j = static_cast<int>(std::lround(std::sqrt(static_cast<double>(jj))));
      if (j * j != jj || j > i) continue;
      for (const Interface side : {Interface::metal_glass, Interface::metal_air}) {
        ModeResonance entry{ResonanceMode{i, j, side}, 0.0, false, {}};
        try {
          entry.wavelength_nm = resonance_wavelength(entry.mode, period_nm, oc);
          entry.ok = true;
        } catch (const numeric_error& e) {
          entry.error = e.what();
        }
        table.push_back(entry);
      }
    }
  }
  return table;
}

struct NearestMode {
  ResonanceMode mode;
  double wavelength_nm = 0.0;
  double distance_nm = 0.0;
};

/// Canonical mode whose resonance lies closest to the query wavelength. Ties go
/// to the lower order, then to the metal-glass interface. Failed modes are
/// skipped; if every mode fails the search reports a numeric error.
inline NearestMode nearest_mode(double query_nm, double period_nm, const OpticalConstants& oc,
                                int max_order) {
  const auto table = mode_table(period_nm, oc, max_order);
  const ModeResonance* best = nullptr;
  for (const auto& entry : table) {
    if (!entry.ok) continue;
    if (!best || std::abs(entry.wavelength_nm - query_nm) <
                     std::abs(best->wavelength_nm - query_nm))
      best = &entry;
  }
  if (!best) throw numeric_error("no resonance mode could be solved for this geometry");
  return {best->mode, best->wavelength_nm, std::abs(best->wavelength_nm - query_nm)};
}

/// Classical small-aperture baseline per unit cell:
/// T = 64/(27 pi^2) * (k r)^4 * (hole area / cell area). Valid for holes well
/// below the wavelength.
inline double bethe_transmission(double hole_diameter_nm, double wavelength_nm,
                                 double period_nm) {
  if (!(hole_diameter_nm > 0.0) || !(wavelength_nm > 0.0) || !(period_nm > 0.0))
    throw validation_error("geometry parameters must be positive");
  if (hole_diameter_nm >= wavelength_nm)
    throw validation_error("classical baseline needs a subwavelength hole (d < lambda)");
  const double r = 0.5 * hole_diameter_nm;
  const double kr = 2.0 * pi / wavelength_nm * r;
  const double fill = pi * r * r / (period_nm * period_nm);
  return 64.0 / (27.0 * pi * pi) * kr * kr * kr * kr * fill;
}

struct SpectrumPoint {
  double wavelength_nm = 0.0;
  double transmittance = 0.0;
};

/// Measured transmittance spectrum of a hole array.
struct SpectrumRecord {
  std::vector<SpectrumPoint> points;
};

/// CSV columns: wavelength_nm,transmittance in [0,1], strictly increasing
/// wavelengths; `#` comments and one header row allowed.
inline SpectrumRecord ingest_spectrum(std::istream& in) {
  SpectrumRecord spec;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_comment_or_blank(line)) continue;
    const auto fields = io::split_fields(line);
    if (fields.size() != 2) throw parse_error("expected 2 columns", lineno);
    SpectrumPoint p;
    if (!io::try_parse_double(fields[0], p.wavelength_nm)) {
      if (!seen_data) continue;  // header
      throw parse_error("cannot parse wavelength", lineno);
    }
    p.transmittance = io::parse_double_or_throw(fields[1], lineno, "transmittance");
    if (p.transmittance < 0.0 || p.transmittance > 1.0)
      throw parse_error("transmittance must lie in [0, 1]", lineno);
    if (!spec.points.empty() && !(p.wavelength_nm > spec.points.back().wavelength_nm))
      throw parse_error("wavelengths must be strictly increasing", lineno);
    spec.points.push_back(p);
    seen_data = true;
  }
  if (spec.points.empty()) throw validation_error("spectrum is empty");
  return spec;
}

/// Linear interpolation of the measured transmittance.
inline double transmittance_at(const SpectrumRecord& spec, double wavelength_nm) {
  if (spec.points.empty()) throw validation_error("spectrum is empty");
  if (wavelength_nm < spec.points.front().wavelength_nm ||
      wavelength_nm > spec.points.back().wavelength_nm)
    throw validation_error("query wavelength outside the measured spectrum");
  auto hi = std::lower_bound(spec.points.begin(), spec.points.end(), wavelength_nm,
                             [](const SpectrumPoint& p, double w) { return p.wavelength_nm < w; });
  if (hi == spec.points.begin()) return hi->transmittance;
  const auto lo = hi - 1;
  const double f = (wavelength_nm - lo->wavelength_nm) / (hi->wavelength_nm - lo->wavelength_nm);
  return lo->transmittance + f * (hi->transmittance - lo->transmittance);
}

/// Measured-over-classical transmission enhancement.
inline double enhancement_at(const SpectrumRecord& spec, double wavelength_nm, double classical) {
  if (!(classical > 0.0)) throw validation_error("classical baseline must be positive");
  return transmittance_at(spec, wavelength_nm) / classical;
}

}  // namespace biphoton::plasmon
