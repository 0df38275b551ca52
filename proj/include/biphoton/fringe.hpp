#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <json.hpp>

#include "biphoton/errors.hpp"
#include "biphoton/io.hpp"
#include "biphoton/linalg.hpp"

namespace biphoton {

/// Wrap a phase into (-pi, pi].
inline double canonical_phase(double phi) {
  double w = std::remainder(phi, 2.0 * pi);
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

/// y(dL) = offset_c + amplitude_a * cos(2*pi*dL/period_nm + phase0).
/// period_nm is the period of the rate curve in dL; for a two-photon scan at
/// source wavelength lambda this comes out as lambda/2.
struct FringeModel {
  double offset_c = 0.0;
  double amplitude_a = 0.0;  ///< >= 0, sign absorbed into phase0
  double phase0 = 0.0;       ///< canonical, (-pi, pi]
  double period_nm = 0.0;
  bool phase_defined = true;  ///< false when the fitted amplitude vanishes

  double evaluate(double delta_l_nm) const {
    return offset_c + amplitude_a * std::cos(2.0 * pi * delta_l_nm / period_nm + phase0);
  }
};

struct FringeFit {
  FringeModel model;
  double residual_rms = 0.0;  ///< weighted RMS of the fit residuals
  double visibility = 0.0;    ///< amplitude/offset clamped to [0, 1] for reporting
  int n_points = 0;
};

enum class FitWeighting {
  uniform,
  poisson,  ///< 1/max(y_model, 1), for raw count data; applied via a uniform pre-fit
};

namespace detail {

struct LinearFringeSolution {
  double offset, amplitude, phase;
  bool phase_defined;
  double weighted_ssr, weight_sum;
};

/// Weighted linear least squares for y = C + p*cos(w x) + q*sin(w x); then
/// A = hypot(p, q), phase0 = atan2(-q, p).
inline LinearFringeSolution solve_linear_fringe(std::span<const CurvePoint> data,
                                                double fringe_period_nm,
                                                std::span<const double> weights) {
  const double omega = 2.0 * pi / fringe_period_nm;
  std::array<double, 9> ata{};
  std::array<double, 3> aty{};
  for (std::size_t k = 0; k < data.size(); ++k) {
    const double w = weights.empty() ? 1.0 : weights[k];
    const std::array<double, 3> basis{1.0, std::cos(omega * data[k].delta_l_nm),
                                      std::sin(omega * data[k].delta_l_nm)};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) ata[3 * i + j] += w * basis[i] * basis[j];
      aty[i] += w * basis[i] * data[k].value;
    }
  }
  const auto coeff =
      solve3(ata, aty, "fringe fit is not identifiable (degenerate phase coverage)");

  LinearFringeSolution sol{};
  sol.offset = coeff[0];
  sol.amplitude = std::hypot(coeff[1], coeff[2]);
  double scale = 0.0;
  for (const auto& p : data) scale = std::max(scale, std::abs(p.value));
  sol.phase_defined = sol.amplitude > 1e-12 * std::max(scale, 1.0);
  if (sol.phase_defined) {
    // Snap sub-precision components so data generated at the +-pi branch point
    // lands on the canonical +pi deterministically.
    double pc = coeff[1], qc = coeff[2];
    if (std::abs(qc) <= 1e-12 * sol.amplitude) qc = 0.0;
    if (std::abs(pc) <= 1e-12 * sol.amplitude) pc = 0.0;
    sol.phase = canonical_phase(std::atan2(qc == 0.0 ? 0.0 : -qc, pc));
  } else {
    sol.phase = 0.0;
  }

  sol.weighted_ssr = 0.0;
  sol.weight_sum = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const double w = weights.empty() ? 1.0 : weights[k];
    const double model = coeff[0] + coeff[1] * std::cos(omega * data[k].delta_l_nm) +
                         coeff[2] * std::sin(omega * data[k].delta_l_nm);
    const double r = data[k].value - model;
    sol.weighted_ssr += w * r * r;
    sol.weight_sum += w;
  }
  return sol;
}

inline void check_fit_preconditions(std::span<const CurvePoint> data, double fringe_period_nm) {
  if (data.size() < 4) throw validation_error("fringe fit needs at least 4 points");
  std::vector<double> xs;
  xs.reserve(data.size());
  for (const auto& p : data) xs.push_back(p.delta_l_nm);
  std::sort(xs.begin(), xs.end());
  std::size_t distinct = 1;
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (xs[k] != xs[k - 1]) ++distinct;
  if (distinct < 3) throw validation_error("fringe fit needs at least 3 distinct delta_l values");
  if (xs.back() - xs.front() < 0.5 * fringe_period_nm)
    throw validation_error("scan span must cover at least half a fringe period");
}

inline FringeFit fit_at_fringe_period(std::span<const CurvePoint> data, double fringe_period_nm,
                                      FitWeighting weighting) {
  if (!(fringe_period_nm > 0.0)) throw validation_error("period must be positive");
  check_fit_preconditions(data, fringe_period_nm);

  std::vector<double> weights;
  LinearFringeSolution sol = solve_linear_fringe(data, fringe_period_nm, weights);
  if (weighting == FitWeighting::poisson) {
    // Poisson variance equals the mean; weight by the uniform pre-fit model so
    // the weights stay uncorrelated with the per-point noise.
    const double omega = 2.0 * pi / fringe_period_nm;
    weights.reserve(data.size());
    for (const auto& p : data) {
      const double model = sol.offset + sol.amplitude * std::cos(omega * p.delta_l_nm + sol.phase);
      weights.push_back(1.0 / std::max(model, 1.0));
    }
    sol = solve_linear_fringe(data, fringe_period_nm, weights);
  }

  FringeFit fit;
  fit.model.offset_c = sol.offset;
  fit.model.amplitude_a = sol.amplitude;
  fit.model.phase0 = sol.phase;
  fit.model.phase_defined = sol.phase_defined;
  fit.model.period_nm = fringe_period_nm;
  fit.residual_rms = std::sqrt(sol.weighted_ssr / sol.weight_sum);
  fit.n_points = static_cast<int>(data.size());
  fit.visibility = sol.offset > 0.0 ? std::clamp(sol.amplitude / sol.offset, 0.0, 1.0) : 0.0;
  return fit;
}

}  // namespace detail

/// Least-squares fringe fit at a fixed source wavelength `period_nm`, using the
/// two-photon convention y = C + A*cos(2 * (2*pi*dL/period_nm) + phase0): the
/// fitted curve repeats every period_nm/2 in dL, and the reported model period
/// is that fringe period.
inline FringeFit fit_fixed_period(std::span<const CurvePoint> data, double period_nm,
                                  FitWeighting weighting = FitWeighting::uniform) {
  if (!(period_nm > 0.0)) throw validation_error("period must be positive");
  return detail::fit_at_fringe_period(data, 0.5 * period_nm, weighting);
}

/// Candidate fringe periods for the free-period search, in dL nanometers.
/// The default range brackets both the single-photon and the two-photon
/// hypothesis for a 702 nm source.
struct PeriodGrid {
  double min_nm = 300.0;
  double max_nm = 800.0;
  double step_nm = 0.5;
};

/// Separable least squares over fringe period: grid scan of the linear fit, then
/// golden-section refinement of the residual to 1e-6 relative tolerance. The
/// fitted period in dL is the de Broglie wavelength readout of the scan.
inline FringeFit fit_free_period(std::span<const CurvePoint> data, PeriodGrid grid = {},
                                 FitWeighting weighting = FitWeighting::uniform) {
  if (!(grid.min_nm > 0.0) || !(grid.max_nm > grid.min_nm) || !(grid.step_nm > 0.0))
    throw validation_error("period grid bounds must be positive and ordered");
  detail::check_fit_preconditions(data, grid.min_nm);

  double span = 0.0;
  {
    double lo = data[0].delta_l_nm, hi = data[0].delta_l_nm;
    for (const auto& p : data) {
      lo = std::min(lo, p.delta_l_nm);
      hi = std::max(hi, p.delta_l_nm);
    }
    span = hi - lo;
  }

  std::vector<double> periods;
  for (double p = grid.min_nm; p <= grid.max_nm + 1e-9 * grid.step_nm; p += grid.step_nm)
    if (p <= 2.0 * span) periods.push_back(p);  // identifiability: span >= period/2
  if (periods.size() < 3)
    throw numeric_error("period grid too coarse to bracket a residual minimum");

  // Mean squared residual as the search objective: same minimizer as the RMS
  // but locally quadratic, which the parabolic polish below relies on.
  const auto objective = [&](double period) {
    const double rms = detail::fit_at_fringe_period(data, period, weighting).residual_rms;
    return rms * rms;
  };

  std::size_t best = 0;
  double best_ssr = objective(periods[0]);
  for (std::size_t k = 1; k < periods.size(); ++k) {
    const double ssr = objective(periods[k]);
    if (ssr < best_ssr) {  // ties keep the smaller period
      best_ssr = ssr;
      best = k;
    }
  }
  if (best == 0 || best + 1 == periods.size())
    throw numeric_error("period grid does not bracket a residual minimum");

  // Golden-section refinement inside the bracketing grid cells.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = periods[best - 1], b = periods[best + 1];
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > 1e-6 * (0.5 * (a + b))) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(x2);
    }
  }
  double refined = 0.5 * (a + b);
  double refined_ssr = objective(refined);

  // Parabolic polish through (a, mid, b): exact for the locally quadratic
  // objective, clamped to the bracket.
  {
    const double fa = objective(a), fb = objective(b);
    const double d1 = (refined - a) * (refined_ssr - fb);
    const double d2 = (refined - b) * (refined_ssr - fa);
    const double denom = 2.0 * (d1 - d2);
    if (denom != 0.0) {
      const double vertex =
          refined - ((refined - a) * d1 - (refined - b) * d2) / denom;
      if (vertex > a && vertex < b) {
        const double vertex_ssr = objective(vertex);
        if (vertex_ssr < refined_ssr) {
          refined = vertex;
          refined_ssr = vertex_ssr;
        }
      }
    }
  }
  if (refined_ssr > best_ssr) refined = periods[best];  // keep the grid winner on ties

  return detail::fit_at_fringe_period(data, refined, weighting);
}

/// Raw fringe contrast A/C of a fit; equals the coherence damping factor for
/// curves of the form C(1 +/- V cos). Unlike FringeFit::visibility this is not
/// clamped, so it can sit slightly above 1 on noisy data.
inline double extract_visibility(const FringeFit& fit) {
  if (!(fit.model.offset_c > 0.0))
    throw validation_error("visibility undefined for non-positive fitted offset");
  return fit.model.amplitude_a / fit.model.offset_c;
}

inline nlohmann::ordered_json fit_to_json(const FringeFit& fit) {
  return nlohmann::ordered_json{{"offset", fit.model.offset_c},
                                {"amplitude", fit.model.amplitude_a},
                                {"phase0_rad", fit.model.phase0},
                                {"phase0_over_pi", fit.model.phase0 / pi},
                                {"period_nm", fit.model.period_nm},
                                {"visibility", fit.visibility},
                                {"residual_rms", fit.residual_rms},
                                {"n_points", fit.n_points}};
}

}  // namespace biphoton
