#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "biphoton/detection.hpp"
#include "biphoton/elements.hpp"
#include "test_util.hpp"

using namespace biphoton;
using testutil::close;
using testutil::max_entry_diff;

TEST_CASE("half-wave plate matrix") {
  const JonesOperator fast_h = hwp(0.0);
  CHECK(fast_h.j_hh == 1.0);
  CHECK(fast_h.j_vv == -1.0);
  CHECK(fast_h.j_hv == 0.0);
  CHECK(fast_h.j_vh == 0.0);

  // involution at any angle
  for (double theta : {0.1, 0.5, pi / 8.0, 1.2}) {
    const JonesOperator twice = hwp(theta) * hwp(theta);
    CHECK(close(twice.j_hh, 1.0));
    CHECK(close(twice.j_vv, 1.0));
    CHECK(close(twice.j_hv, 0.0));
    CHECK(close(twice.j_vh, 0.0));
  }

  const BiphotonState lifted = apply_jones(hwp(pi / 8.0), make_hv_pair());
  CHECK(close(lifted.c20, 1.0 / std::numbers::sqrt2));
  CHECK(close(lifted.c02, -1.0 / std::numbers::sqrt2));
}

TEST_CASE("phase plate") {
  const JonesOperator none = phase_plate(0.0);
  CHECK(none.j_hh == 1.0);
  CHECK(none.j_vv == 1.0);

  // biphoton |VV> component accumulates twice the single-photon phase
  const double dphi = 0.37;
  const BiphotonState in{1.0 / std::numbers::sqrt2, 0.0, -1.0 / std::numbers::sqrt2};
  const BiphotonState out = apply_jones(phase_plate(dphi), in);
  CHECK(close(out.c02, in.c02 * std::polar(1.0, 2.0 * dphi)));

  // dphi = pi is invisible to the two-photon state: e^{i 2 pi} = 1
  const BiphotonState full_turn = apply_jones(phase_plate(pi), in);
  CHECK(close(full_turn.c20, in.c20));
  CHECK(close(full_turn.c02, in.c02));
}

TEST_CASE("path difference to phase") {
  CHECK(delta_l_to_phase(702.0, 702.0) == 2.0 * pi);
  CHECK(delta_l_to_phase(0.0, 702.0) == 0.0);
  CHECK(delta_l_to_phase(175.5, 702.0) == Catch::Approx(pi / 2.0).epsilon(1e-15));
  CHECK_THROWS_AS(delta_l_to_phase(100.0, 0.0), validation_error);
  CHECK_THROWS_AS(delta_l_to_phase(100.0, -1.0), validation_error);
}

TEST_CASE("hole array jones operator") {
  HoleArrayParams p;
  p.transmittance_t = 1.0;
  p.birefringence_beta = 0.0;
  const JonesOperator trivial = hole_array_jones(p);
  CHECK(trivial.j_hh == 1.0);
  CHECK(close(trivial.j_vv, 1.0));

  // tomography: (|H> + |V>)/sqrt(2) re-emerges as (|H> - i|V>)/sqrt(2), times sqrt(t)
  HoleArrayParams measured;  // defaults: t = 0.032, beta = -pi/2
  const double r = 1.0 / std::numbers::sqrt2;
  const PolarizationAmplitudePair diag{r, r};
  const auto out = apply_jones(hole_array_jones(measured), diag);
  const double amp = std::sqrt(measured.transmittance_t);
  // compare up to a global phase via the overlap with the expected state
  const cplx expected_h{r, 0.0}, expected_v{0.0, -r};
  const cplx overlap = std::conj(expected_h) * out.h + std::conj(expected_v) * out.v;
  CHECK(std::abs(overlap) == Catch::Approx(amp).margin(1e-12));
  CHECK(out.norm2() == Catch::Approx(measured.transmittance_t).margin(1e-15));

  // biphoton (|HH> - |VV>)/sqrt(2) picks up a relative pi: -> (|HH> + |VV>) * t/sqrt(2)
  const BiphotonState bell{r, 0.0, -r};
  const BiphotonState through = apply_jones(hole_array_jones(measured), bell);
  const double t = measured.transmittance_t;
  CHECK(close(through.c20, t * r));
  CHECK(close(through.c02, t * r));
  CHECK(close(through.c11, 0.0));
}

TEST_CASE("hole array params validation") {
  HoleArrayParams p;
  p.transmittance_t = 0.0;
  CHECK_THROWS_AS(p.validate(), validation_error);
  p.transmittance_t = 1.5;
  CHECK_THROWS_AS(p.validate(), validation_error);

  p.transmittance_t = 0.5;
  p.dephasing_covariance = {1.0, 0.5, 0.0, 0.4, 1.0, 0.0, 0.0, 0.0, 1.0};  // asymmetric
  CHECK_THROWS_AS(p.validate(), validation_error);

  p.dephasing_covariance = {1.0, 0.999, 0.0, 0.999, 0.5, 0.0, 0.0, 0.0, 0.0};  // indefinite
  CHECK_THROWS_AS(p.validate(), validation_error);
}

TEST_CASE("channel with zero covariance equals the pure jones route") {
  std::mt19937_64 rng(11);
  HoleArrayParams p;
  p.transmittance_t = 0.4;
  p.birefringence_beta = -pi / 2.0;
  for (int trial = 0; trial < 20; ++trial) {
    const BiphotonState s = testutil::random_state(rng);
    const BiphotonDensityMatrix via_channel = hole_array_channel(p, to_density(s));
    const BiphotonDensityMatrix via_state = to_density(apply_jones(hole_array_jones(p), s));
    CHECK(max_entry_diff(via_channel.rho, via_state.rho) < 1e-12);
    CHECK(std::abs(via_channel.trace() -
                   p.transmittance_t * p.transmittance_t * s.norm2()) < 1e-12);
  }
}

TEST_CASE("selective dephasing damps only the affected coherences") {
  // Var(theta_HH - theta_VV) = 0 but Var(theta_HH - theta_HV) large:
  // theta_HH = theta_VV = x with Var(x) = 4, theta_HV independent.
  HoleArrayParams p;
  p.transmittance_t = 1.0;
  p.birefringence_beta = 0.0;
  p.dephasing_covariance = {4.0, 0.0, 4.0, 0.0, 0.0, 0.0, 4.0, 0.0, 4.0};

  const double r = 1.0 / std::numbers::sqrt2;
  const BiphotonDensityMatrix mixed = to_density({0.5, r, 0.5});
  const BiphotonDensityMatrix out = hole_array_channel(p, mixed);
  // c20-c02 coherence preserved
  CHECK(close(out.rho(0, 2), mixed.rho(0, 2), 1e-12));
  // c20-c11 coherence damped by e^{-4/2}
  CHECK(close(out.rho(0, 1), mixed.rho(0, 1) * std::exp(-2.0), 1e-12));
  // diagonals untouched
  for (std::size_t k = 0; k < 3; ++k) CHECK(close(out.rho(k, k), mixed.rho(k, k), 1e-12));
}

TEST_CASE("gaussian damping factor matches monte carlo phase sampling") {
  // E[e^{i(theta_i - theta_j)}] = e^{-Var(theta_i - theta_j)/2} for zero-mean
  // Gaussian phases; estimate the expectation by direct sampling.
  const double s2 = 1.0;
  DephasingCovariance cov{};
  cov[0] = s2;  // theta_HH ~ N(0, s2); theta_HV = theta_VV = 0

  DephasingSampler sampler(cov);
  std::mt19937_64 rng(404);
  const int n = 200000;
  cplx acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto theta = sampler(rng);
    acc += std::polar(1.0, theta[0] - theta[2]);
  }
  const cplx mc_factor = acc / static_cast<double>(n);
  const double se = 1.0 / std::sqrt(static_cast<double>(n));

  HoleArrayParams p;
  p.transmittance_t = 1.0;
  p.birefringence_beta = 0.0;
  p.dephasing_covariance = cov;
  const double r = 1.0 / std::numbers::sqrt2;
  const BiphotonDensityMatrix out = hole_array_channel(p, to_density({r, 0.0, r}));
  const double analytic = std::real(out.rho(0, 2)) / 0.5;  // damping of the 0-2 coherence

  CHECK(std::abs(analytic - std::exp(-0.5 * s2)) < 1e-12);
  CHECK(std::abs(mc_factor - cplx(analytic)) < 3.0 * se);
}

TEST_CASE("channel keeps density matrices physical") {
  std::mt19937_64 rng(99);
  HoleArrayParams p;
  p.transmittance_t = 0.7;
  p.birefringence_beta = 1.1;
  for (int trial = 0; trial < 50; ++trial) {
    p.dephasing_covariance = testutil::random_psd_covariance(rng);
    const BiphotonDensityMatrix out = hole_array_channel(p, to_density(testutil::random_state(rng)));
    CHECK_NOTHROW(out.validate());
  }
}

TEST_CASE("non-psd covariance is rejected by the channel") {
  HoleArrayParams p;
  p.dephasing_covariance = {1.0, 2.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(hole_array_channel(p, to_density(make_hv_pair())), validation_error);
}

TEST_CASE("birefringence is a global phase for the hv pair") {
  // |HV> only excites |1_H 1_V>, so beta cannot move any detection probability.
  HoleArrayParams a, b;
  a.birefringence_beta = -pi / 2.0;
  b.birefringence_beta = 0.83;
  const BiphotonDensityMatrix ra = post_select(hole_array_channel(a, to_density(make_hv_pair())));
  const BiphotonDensityMatrix rb = post_select(hole_array_channel(b, to_density(make_hv_pair())));
  const JonesOperator h = hwp(pi / 8.0);
  for (double dphi : {0.0, 0.4, 1.9}) {
    const auto fa = apply_jones(h, apply_jones(phase_plate(dphi), ra));
    const auto fb = apply_jones(h, apply_jones(phase_plate(dphi), rb));
    CHECK(pbs_coincidence_prob(fa) == Catch::Approx(pbs_coincidence_prob(fb)).margin(1e-12));
    CHECK(hh_coincidence_prob(fa) == Catch::Approx(hh_coincidence_prob(fb)).margin(1e-12));
  }
}
