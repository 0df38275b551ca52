#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/io.hpp"
#include "biphoton/state.hpp"

namespace biphoton {

/// Coincidence-rate convention.
///  - paper: per ordered outcome; the polarizing-beam-splitter rate reads
///    (1/4)(1 + cos 2*delta_phi) for the plain interferometer, i.e. half the
///    projection probability, split across |HV> and |VH> clicks.
///  - physical: total coincidence probability (the projection itself).
enum class Normalization { paper, physical };

struct DetectionConfig {
  double pair_rate_hz = 4000.0;  ///< detected pairs per second at unit probability
  std::uint64_t seed = 0;
  Normalization normalization = Normalization::paper;
  double background_rate_hz = 0.0;  ///< optional flat accidental rate

  void validate() const {
    if (!(pair_rate_hz > 0.0)) throw validation_error("pair_rate_hz must be positive");
    if (background_rate_hz < 0.0) throw validation_error("background_rate_hz must be >= 0");
  }
};

/// One scan point of recorded coincidences.
struct CountRecord {
  double delta_l_nm = 0.0;
  std::uint64_t counts_hv = 0;
  std::uint64_t counts_hh = 0;
  double integration_s = 1.0;
};

namespace detail {
inline void require_unit_trace(const BiphotonDensityMatrix& rho) {
  if (std::abs(rho.trace() - 1.0) > 1e-9)
    throw validation_error("detection requires a trace-normalized density matrix");
}
}  // namespace detail

/// Coincidence probability behind the polarizing beam splitter: the |1_H 1_V>
/// population, halved in paper normalization.
inline double pbs_coincidence_prob(const BiphotonDensityMatrix& rho,
                                   Normalization mode = Normalization::physical) {
  detail::require_unit_trace(rho);
  const double p = std::real(rho.rho(1, 1));
  return mode == Normalization::paper ? 0.5 * p : p;
}

inline double pbs_coincidence_prob(const BiphotonState& s,
                                   Normalization mode = Normalization::physical) {
  return pbs_coincidence_prob(to_density(s), mode);
}

/// Coincidence probability for the |2_H> projection: a 50/50 beam splitter
/// behind the PBS output splits the two H photons with probability 1/2.
inline double hh_coincidence_prob(const BiphotonDensityMatrix& rho) {
  detail::require_unit_trace(rho);
  return 0.5 * std::real(rho.rho(0, 0));
}

inline double hh_coincidence_prob(const BiphotonState& s) {
  return hh_coincidence_prob(to_density(s));
}

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Poisson count draw with mean prob * pair_rate * integration (+ background).
/// Deterministic in (cfg.seed, stream) so concurrent scan points stay
/// schedule-independent: give each point its own stream index.
inline std::uint64_t sample_counts(double prob, const DetectionConfig& cfg, double integration_s,
                                   std::uint64_t stream = 0) {
  cfg.validate();
  if (!(prob >= 0.0) || prob > 1.0) throw validation_error("probability must lie in [0, 1]");
  if (!(integration_s > 0.0)) throw validation_error("integration time must be positive");
  const double mean = prob * cfg.pair_rate_hz * integration_s +
                      cfg.background_rate_hz * integration_s;
  if (mean == 0.0) return 0;
  std::mt19937_64 rng(detail::splitmix64(cfg.seed ^ detail::splitmix64(stream)));
  std::poisson_distribution<std::uint64_t> poisson(mean);
  return poisson(rng);
}

/// Fringe contrast (max - min) / (max + min) of a scanned curve.
inline double visibility(std::span<const CurvePoint> curve) {
  if (curve.size() < 2) throw validation_error("visibility needs at least two points");
  double lo = curve[0].value, hi = curve[0].value;
  for (const auto& p : curve) {
    lo = std::min(lo, p.value);
    hi = std::max(hi, p.value);
  }
  if (hi + lo == 0.0) throw numeric_error("visibility undefined for an all-zero curve");
  return (hi - lo) / (hi + lo);
}

inline void write_counts_csv(std::ostream& out, std::span<const CountRecord> records) {
  out << "delta_l_nm,counts_hv,counts_hh,integration_s\n";
  for (const auto& r : records) {
    out << io::format_double(r.delta_l_nm) << ',' << r.counts_hv << ',' << r.counts_hh << ','
        << io::format_double(r.integration_s) << '\n';
  }
}

inline std::vector<CountRecord> read_counts_csv(std::istream& in) {
  std::vector<CountRecord> records;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_comment_or_blank(line)) continue;
    const auto fields = io::split_fields(line);
    if (fields.size() != 4) throw parse_error("expected 4 columns", lineno);
    if (!header_seen) {
      header_seen = true;
      double probe;
      if (!io::try_parse_double(fields[0], probe)) continue;  // header row
    }
    CountRecord r;
    r.delta_l_nm = io::parse_double_or_throw(fields[0], lineno, "delta_l_nm");
    if (!io::try_parse_u64(fields[1], r.counts_hv) || !io::try_parse_u64(fields[2], r.counts_hh))
      throw parse_error("counts must be nonnegative integers", lineno);
    r.integration_s = io::parse_double_or_throw(fields[3], lineno, "integration_s");
    if (!(r.integration_s > 0.0)) throw parse_error("integration_s must be positive", lineno);
    records.push_back(r);
  }
  return records;
}

}  // namespace biphoton
