#pragma once

#include <cmath>
#include <complex>

#include "biphoton/errors.hpp"
#include "biphoton/linalg.hpp"

namespace biphoton {

/// 2x2 complex single-photon polarization operator acting on (h, v) amplitudes.
/// Sub-unitary operators model loss; the survival probability of a state is the
/// squared norm after application.
struct JonesOperator {
  cplx j_hh{1.0}, j_hv{0.0};
  cplx j_vh{0.0}, j_vv{1.0};

  static JonesOperator identity() { return {}; }

  /// Composition: (a * b) acts as b first, then a.
  friend JonesOperator operator*(const JonesOperator& a, const JonesOperator& b) {
    return {a.j_hh * b.j_hh + a.j_hv * b.j_vh, a.j_hh * b.j_hv + a.j_hv * b.j_vv,
            a.j_vh * b.j_hh + a.j_vv * b.j_vh, a.j_vh * b.j_hv + a.j_vv * b.j_vv};
  }

  cplx det() const { return j_hh * j_vv - j_hv * j_vh; }

  /// Largest singular value, via the larger eigenvalue of J^dagger J (stable
  /// for near-unitary operators, unlike the trace/determinant form).
  double spectral_norm() const {
    const double a11 = std::norm(j_hh) + std::norm(j_vh);
    const double a22 = std::norm(j_hv) + std::norm(j_vv);
    const cplx a12 = std::conj(j_hh) * j_hv + std::conj(j_vh) * j_vv;
    const double mean = 0.5 * (a11 + a22);
    const double diff = 0.5 * (a11 - a22);
    return std::sqrt(mean + std::hypot(diff, std::abs(a12)));
  }

  bool is_unitary(double tol = 1e-12) const {
    const cplx a = j_hh * std::conj(j_hh) + j_hv * std::conj(j_hv);
    const cplx b = j_hh * std::conj(j_vh) + j_hv * std::conj(j_vv);
    const cplx c = j_vh * std::conj(j_vh) + j_vv * std::conj(j_vv);
    return std::abs(a - 1.0) <= tol && std::abs(b) <= tol && std::abs(c - 1.0) <= tol;
  }

  /// Passive-element check: spectral norm must not exceed 1.
  void validate(double tol = 1e-12) const {
    if (spectral_norm() > 1.0 + tol)
      throw validation_error("JonesOperator has gain (spectral norm > 1)");
  }
};

/// Single-photon polarization amplitudes. The all-zero state is reserved for the
/// explicit `absorbed()` marker; constructing it directly is an error.
struct PolarizationAmplitudePair {
  cplx h{}, v{};

  PolarizationAmplitudePair(cplx h_amp, cplx v_amp) : h(h_amp), v(v_amp) {
    const double n2 = norm2();
    if (n2 == 0.0)
      throw validation_error("zero polarization state; use PolarizationAmplitudePair::absorbed()");
    if (n2 > 1.0 + 1e-9)
      throw validation_error("polarization amplitudes exceed unit norm");
  }

  static PolarizationAmplitudePair absorbed() { return PolarizationAmplitudePair(tag{}); }

  bool is_absorbed() const { return h == 0.0 && v == 0.0; }

  double norm2() const { return std::norm(h) + std::norm(v); }

private:
  struct tag {};
  explicit PolarizationAmplitudePair(tag) {}
};

/// Apply a Jones operator to a single photon. Complete absorption yields the
/// explicit absorbed marker.
inline PolarizationAmplitudePair apply_jones(const JonesOperator& j,
                                             const PolarizationAmplitudePair& s) {
  j.validate();
  if (s.is_absorbed()) return PolarizationAmplitudePair::absorbed();
  const cplx h = j.j_hh * s.h + j.j_hv * s.v;
  const cplx v = j.j_vh * s.h + j.j_vv * s.v;
  if (h == 0.0 && v == 0.0) return PolarizationAmplitudePair::absorbed();
  return {h, v};
}

/// Collinear two-photon polarization state over the symmetric basis, amplitudes
/// ordered (|2_H>, |1_H 1_V>, |2_V>). Norm below 1 encodes loss; the squared
/// norm is the two-photon survival probability.
struct BiphotonState {
  cplx c20{}, c11{}, c02{};
  bool normalized = false;

  BiphotonState() = default;
  BiphotonState(cplx a20, cplx a11, cplx a02)
      : c20(a20), c11(a11), c02(a02), normalized(std::abs(norm2() - 1.0) <= 1e-12) {}

  double norm2() const { return std::norm(c20) + std::norm(c11) + std::norm(c02); }

  Vec3c amplitudes() const { return Vec3c{{c20, c11, c02}}; }

  static BiphotonState from_amplitudes(const Vec3c& a) { return {a[0], a[1], a[2]}; }
};

/// The |1_H 1_V> photon pair produced by the collinear type-II source.
inline BiphotonState make_hv_pair() { return {0.0, 1.0, 0.0}; }

/// Lift of a Jones operator to the symmetric two-photon space: the creation
/// operators transform as a_i^dag -> sum_j J_ji a_j^dag, and the sqrt(2) Fock
/// factors of |2> states are folded in. Rows/columns ordered like BiphotonState.
/// The lift is multiplicative and maps unitaries to unitaries.
inline Mat3c symmetric_square(const JonesOperator& j) {
  j.validate();
  const double r2 = std::numbers::sqrt2;
  Mat3c m;
  m(0, 0) = j.j_hh * j.j_hh;
  m(0, 1) = r2 * j.j_hh * j.j_hv;
  m(0, 2) = j.j_hv * j.j_hv;
  m(1, 0) = r2 * j.j_hh * j.j_vh;
  m(1, 1) = j.j_hh * j.j_vv + j.j_hv * j.j_vh;
  m(1, 2) = r2 * j.j_hv * j.j_vv;
  m(2, 0) = j.j_vh * j.j_vh;
  m(2, 1) = r2 * j.j_vh * j.j_vv;
  m(2, 2) = j.j_vv * j.j_vv;
  return m;
}

/// Apply a Jones operator to both photons. No renormalization: loss shrinks the
/// norm and norm^2 is the pair survival probability.
inline BiphotonState apply_jones(const JonesOperator& j, const BiphotonState& s) {
  return BiphotonState::from_amplitudes(symmetric_square(j) * s.amplitudes());
}

enum class TraceConvention {
  post_selected,  ///< trace 1, conditioned on both photons surviving
  unnormalized,   ///< trace equals the pair survival probability
};

/// 3x3 Hermitian state of the biphoton after (possibly) dephasing channels.
struct BiphotonDensityMatrix {
  Mat3c rho;
  TraceConvention trace_convention = TraceConvention::post_selected;

  double trace() const { return std::real(rho.trace()); }

  /// Hermiticity within `herm_tol`, positive semidefiniteness (min eigenvalue
  /// >= -psd_tol) and, for post-selected states, unit trace.
  void validate(double herm_tol = 1e-12, double psd_tol = 1e-10) const {
    const double scale = std::max(1.0, rho.max_abs());
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = r; c < 3; ++c)
        if (std::abs(rho(r, c) - std::conj(rho(c, r))) > herm_tol * scale)
          throw validation_error("density matrix is not Hermitian");
    const auto ev = hermitian_eigenvalues(rho);
    if (ev[0] < -psd_tol * scale)
      throw validation_error("density matrix is not positive semidefinite");
    if (trace_convention == TraceConvention::post_selected && std::abs(trace() - 1.0) > 1e-9)
      throw validation_error("post-selected density matrix must have unit trace");
  }
};

/// Rank-1 density matrix of a pure state; trace equals the squared norm.
inline BiphotonDensityMatrix to_density(const BiphotonState& s) {
  BiphotonDensityMatrix d;
  d.rho = outer(s.amplitudes(), s.amplitudes());
  d.trace_convention = std::abs(d.trace() - 1.0) <= 1e-9 ? TraceConvention::post_selected
                                                         : TraceConvention::unnormalized;
  return d;
}

/// Renormalize onto the detected (transmitted) subensemble.
inline BiphotonDensityMatrix post_select(const BiphotonDensityMatrix& d) {
  const double tr = d.trace();
  if (!(tr > 0.0)) throw validation_error("cannot post-select a state with zero trace");
  BiphotonDensityMatrix out;
  for (std::size_t k = 0; k < 9; ++k) out.rho.m[k] = d.rho.m[k] / tr;
  out.trace_convention = TraceConvention::post_selected;
  return out;
}

/// Conjugate a density matrix by the two-photon lift of a Jones operator.
inline BiphotonDensityMatrix apply_jones(const JonesOperator& j, const BiphotonDensityMatrix& d) {
  const Mat3c m = symmetric_square(j);
  BiphotonDensityMatrix out;
  out.rho = m * d.rho * m.adjoint();
  out.trace_convention = std::abs(out.trace() - 1.0) <= 1e-9 ? TraceConvention::post_selected
                                                             : TraceConvention::unnormalized;
  return out;
}

}  // namespace biphoton
