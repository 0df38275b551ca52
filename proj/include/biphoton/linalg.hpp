#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>

#include "biphoton/errors.hpp"

namespace biphoton {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// 3-component complex vector (amplitude triple).
struct Vec3c {
  std::array<cplx, 3> v{};

  cplx& operator[](std::size_t i) { return v[i]; }
  const cplx& operator[](std::size_t i) const { return v[i]; }

  double norm2() const {
    return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
  }
};

/// 3x3 complex matrix, row-major.
struct Mat3c {
  std::array<cplx, 9> m{};

  cplx& operator()(std::size_t r, std::size_t c) { return m[3 * r + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return m[3 * r + c]; }

  static Mat3c identity() {
    Mat3c eye;
    eye(0, 0) = eye(1, 1) = eye(2, 2) = 1.0;
    return eye;
  }

  Mat3c adjoint() const {
    Mat3c a;
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) a(r, c) = std::conj((*this)(c, r));
    return a;
  }

  cplx trace() const { return m[0] + m[4] + m[8]; }

  cplx det() const {
    const Mat3c& a = *this;
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  }

  double max_abs() const {
    double mx = 0.0;
    for (const cplx& x : m) mx = std::max(mx, std::abs(x));
    return mx;
  }

  friend Mat3c operator*(const Mat3c& a, const Mat3c& b) {
    Mat3c r;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
        r(i, j) = s;
      }
    return r;
  }

  friend Vec3c operator*(const Mat3c& a, const Vec3c& x) {
    Vec3c y;
    for (std::size_t i = 0; i < 3; ++i)
      y[i] = a(i, 0) * x[0] + a(i, 1) * x[1] + a(i, 2) * x[2];
    return y;
  }
};

/// Outer product x * y^dagger.
inline Mat3c outer(const Vec3c& x, const Vec3c& y) {
  Mat3c r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = x[i] * std::conj(y[j]);
  return r;
}

/// Eigenvalues (ascending) and optional eigenvectors (columns of `vectors`) of a
/// Hermitian 3x3 matrix, by cyclic complex Jacobi rotations. The input is
/// symmetrized first, so tiny Hermiticity violations are tolerated.
inline std::array<double, 3> hermitian_eigenvalues(const Mat3c& in, Mat3c* vectors = nullptr) {
  Mat3c a;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) a(r, c) = 0.5 * (in(r, c) + std::conj(in(c, r)));

  Mat3c v = Mat3c::identity();
  const double scale = std::max(a.max_abs(), 1e-300);

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
    if (off < 1e-15 * scale) break;
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t q = p + 1; q < 3; ++q) {
        const cplx apq = a(p, q);
        const double g = std::abs(apq);
        if (g < 1e-18 * scale) continue;
        const cplx phase = apq / g;  // a_pq = g * e^{i phi}
        const double alpha = std::real(a(p, p));
        const double beta = std::real(a(q, q));
        // Solve (alpha-beta)*c*s + g*(c^2-s^2) = 0 via t^2 - 2*tau*t - 1 = 0.
        const double tau = (alpha - beta) / (2.0 * g);
        const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Plane rotation R: R(p,p)=c*e^{i phi}, R(p,q)=s*e^{i phi}, R(q,p)=-s, R(q,q)=c.
        const cplx rpp = c * phase, rpq = s * phase;
        const cplx rqp = -s, rqq = c;
        for (std::size_t k = 0; k < 3; ++k) {  // A <- A * R
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * rpp + akq * rqp;
          a(k, q) = akp * rpq + akq * rqq;
        }
        for (std::size_t k = 0; k < 3; ++k) {  // A <- R^dagger * A
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(rpp) * apk + std::conj(rqp) * aqk;
          a(q, k) = std::conj(rpq) * apk + std::conj(rqq) * aqk;
        }
        for (std::size_t k = 0; k < 3; ++k) {  // V <- V * R
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * rpp + vkq * rqp;
          v(k, q) = vkp * rpq + vkq * rqq;
        }
      }
    }
  }

  std::array<double, 3> ev{std::real(a(0, 0)), std::real(a(1, 1)), std::real(a(2, 2))};
  std::array<std::size_t, 3> order{0, 1, 2};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      if (ev[order[j]] < ev[order[i]]) std::swap(order[i], order[j]);

  std::array<double, 3> sorted{ev[order[0]], ev[order[1]], ev[order[2]]};
  if (vectors) {
    Mat3c vs;
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t r = 0; r < 3; ++r) vs(r, c) = v(r, order[c]);
    *vectors = vs;
  }
  return sorted;
}

/// Solve a real 3x3 linear system by Gaussian elimination with partial pivoting.
/// Throws numeric_error when the matrix is rank deficient.
inline std::array<double, 3> solve3(std::array<double, 9> a, std::array<double, 3> b,
                                    const char* what = "singular 3x3 system") {
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) throw numeric_error(what);

  std::array<std::size_t, 3> row{0, 1, 2};
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < 3; ++r)
      if (std::abs(a[3 * row[r] + k]) > std::abs(a[3 * row[piv] + k])) piv = r;
    std::swap(row[k], row[piv]);
    const double akk = a[3 * row[k] + k];
    if (std::abs(akk) <= 1e-12 * scale) throw numeric_error(what);
    for (std::size_t r = k + 1; r < 3; ++r) {
      const double f = a[3 * row[r] + k] / akk;
      for (std::size_t c = k; c < 3; ++c) a[3 * row[r] + c] -= f * a[3 * row[k] + c];
      b[row[r]] -= f * b[row[k]];
    }
  }
  std::array<double, 3> x{};
  for (int k = 2; k >= 0; --k) {
    double s = b[row[static_cast<std::size_t>(k)]];
    for (std::size_t c = static_cast<std::size_t>(k) + 1; c < 3; ++c)
      s -= a[3 * row[static_cast<std::size_t>(k)] + c] * x[c];
    x[static_cast<std::size_t>(k)] = s / a[3 * row[static_cast<std::size_t>(k)] + static_cast<std::size_t>(k)];
  }
  return x;
}

}  // namespace biphoton
