#pragma once

#include <array>
#include <cmath>
#include <random>

#include "biphoton/errors.hpp"
#include "biphoton/state.hpp"

namespace biphoton {

/// Half-wave plate with fast axis at `theta` from horizontal.
inline JonesOperator hwp(double theta_rad) {
  const double c = std::cos(2.0 * theta_rad);
  const double s = std::sin(2.0 * theta_rad);
  return {c, s, s, -c};
}

/// Retarder adding `delta_phi` to the vertical mode: diag(1, e^{i delta_phi}).
/// On a biphoton the |2_V> component accumulates twice the phase.
inline JonesOperator phase_plate(double delta_phi_rad) {
  return {1.0, 0.0, 0.0, std::polar(1.0, delta_phi_rad)};
}

/// Path-difference axis convention of the fringe scans: delta_phi = 2*pi*dL/lambda.
inline double delta_l_to_phase(double delta_l_nm, double wavelength_nm) {
  if (!(wavelength_nm > 0.0)) throw validation_error("wavelength must be positive");
  return 2.0 * pi * delta_l_nm / wavelength_nm;
}

/// Symmetric 3x3 covariance of the random basis phases (theta_HH, theta_HV,
/// theta_VV), row-major, in radians^2.
using DephasingCovariance = std::array<double, 9>;

inline double covariance_entry(const DephasingCovariance& cov, std::size_t i, std::size_t j) {
  return cov[3 * i + j];
}

/// Var(theta_i - theta_j) for the jointly Gaussian basis phases.
inline double phase_difference_variance(const DephasingCovariance& cov, std::size_t i,
                                        std::size_t j) {
  return covariance_entry(cov, i, i) + covariance_entry(cov, j, j) -
         2.0 * covariance_entry(cov, i, j);
}

inline void validate_dephasing_covariance(const DephasingCovariance& cov) {
  double scale = 1.0;
  for (double x : cov) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      if (std::abs(cov[3 * i + j] - cov[3 * j + i]) > 1e-12 * scale)
        throw validation_error("dephasing covariance must be symmetric");
  Mat3c m;
  for (std::size_t k = 0; k < 9; ++k) m.m[k] = cov[k];
  if (hermitian_eigenvalues(m)[0] < -1e-10 * scale)
    throw validation_error("dephasing covariance must be positive semidefinite");
}

/// Effective single-channel model of the perforated metal film: scalar intensity
/// transmittance per photon, an H/V birefringence phase, and Gaussian random
/// phases on the biphoton basis states.
struct HoleArrayParams {
  double transmittance_t = 0.032;
  double birefringence_beta = -pi / 2.0;  ///< phase of V relative to H, radians
  DephasingCovariance dephasing_covariance{};
  double period_nm = 600.0;
  double hole_diameter_nm = 200.0;
  double film_thickness_nm = 135.0;

  void validate() const {
    if (!(transmittance_t > 0.0) || transmittance_t > 1.0)
      throw validation_error("transmittance must lie in (0, 1]");
    validate_dephasing_covariance(dephasing_covariance);
  }
};

/// Deterministic part of the hole-array channel: sqrt(t) * diag(1, e^{i beta}).
/// The default beta = -pi/2 sends (|H> + |V>)/sqrt(2) to (|H> - i|V>)/sqrt(2),
/// and flips the relative phase of |2_H> and |2_V> by pi.
inline JonesOperator hole_array_jones(const HoleArrayParams& p) {
  p.validate();
  const double amp = std::sqrt(p.transmittance_t);
  return {amp, 0.0, 0.0, amp * std::polar(1.0, p.birefringence_beta)};
}

/// Damping factors e^{-Var(theta_i - theta_j)/2} applied entrywise to the
/// density matrix by Gaussian dephasing. Diagonal factors are exactly 1.
inline Mat3c dephasing_factors(const DephasingCovariance& cov) {
  Mat3c f;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      f(i, j) = std::exp(-0.5 * phase_difference_variance(cov, i, j));
  return f;
}

/// Full hole-array quantum channel: loss + birefringence conjugation followed by
/// Gaussian dephasing of the off-diagonals. The output trace is t^2 times the
/// input trace; renormalize with post_select() when conditioning on detection.
inline BiphotonDensityMatrix hole_array_channel(const HoleArrayParams& p,
                                                const BiphotonDensityMatrix& rho) {
  p.validate();
  BiphotonDensityMatrix out = apply_jones(hole_array_jones(p), rho);
  const Mat3c f = dephasing_factors(p.dephasing_covariance);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) out.rho(i, j) *= f(i, j);
  out.trace_convention = std::abs(out.trace() - 1.0) <= 1e-9 ? TraceConvention::post_selected
                                                             : TraceConvention::unnormalized;
  return out;
}

/// Draws jointly Gaussian phase triples (theta_HH, theta_HV, theta_VV) with the
/// given covariance. Used to cross-check the closed-form damping factors.
class DephasingSampler {
public:
  explicit DephasingSampler(const DephasingCovariance& cov) {
    validate_dephasing_covariance(cov);
    Mat3c m;
    for (std::size_t k = 0; k < 9; ++k) m.m[k] = cov[k];
    Mat3c vectors;
    const auto ev = hermitian_eigenvalues(m, &vectors);
    for (std::size_t c = 0; c < 3; ++c) {
      const double sd = std::sqrt(std::max(ev[c], 0.0));
      for (std::size_t r = 0; r < 3; ++r) factor_[3 * r + c] = std::real(vectors(r, c)) * sd;
    }
  }

  std::array<double, 3> operator()(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss;
    const std::array<double, 3> z{gauss(rng), gauss(rng), gauss(rng)};
    std::array<double, 3> theta{};
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) theta[r] += factor_[3 * r + c] * z[c];
    return theta;
  }

private:
  std::array<double, 9> factor_{};  // V * sqrt(Lambda), row-major
};

}  // namespace biphoton
