// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>

#include "swipt/pa.hpp"
#include "swipt/rng.hpp"

using namespace swipt;

TEST_CASE("soft limiter is linear at the bottom and saturates at the top") {
  PaModel pa;  // p_sat = 0.1, gain 1, p = 3
  CHECK(rapp_am_am(1e-4, pa) == doctest::Approx(1e-4).epsilon(1e-9));
  CHECK(rapp_am_am(100.0, pa) == doctest::Approx(std::sqrt(0.1)).epsilon(1e-6));
  // At the saturation amplitude the curve sits 2^(-1/6) below it.
  CHECK(rapp_am_am(std::sqrt(0.1), pa) ==
        doctest::Approx(std::sqrt(0.1) * std::pow(2.0, -1.0 / 6.0)).epsilon(1e-12));

  double prev = 0.0;
  for (double a = 0.01; a < 2.0; a += 0.01) {
    const double out = rapp_am_am(a, pa);
    CHECK(out > prev);
    prev = out;
  }

  PaModel g2 = pa;
  g2.gain = 2.0;
  CHECK(rapp_am_am(1e-5, g2) == doctest::Approx(2e-5).epsilon(1e-9));
}

TEST_CASE("amplify rescales to the commanded drive and preserves phase") {
  Rng rng(7);
  const CVec x = rng.cgaussian_vector(64);
  PaModel pa;
  const PaOutput out = amplify(x, pa, 0.02);
  CHECK(mean_power(out.reference) == doctest::Approx(0.02).epsilon(1e-12));
  for (int i = 0; i < 5; ++i) {
    const Complex r = out.reference(i);
    const Complex y = out.output(i);
    // Phase preserved: output is a positive real multiple of the input.
    CHECK(std::abs(std::arg(y) - std::arg(r)) < 1e-12);
    CHECK(std::abs(y) == doctest::Approx(rapp_am_am(std::abs(r), pa)).epsilon(1e-12));
  }
}

TEST_CASE("backoff and drain efficiency arithmetic") {
  CHECK(drain_efficiency(0.0, 0.65) == doctest::Approx(0.65));
  CHECK(drain_efficiency(20.0 * std::log10(2.0), 0.65) == doctest::Approx(0.325));

  PaModel pa;
  CVec tone = CVec::Ones(16);
  const PaOutput out = amplify(tone, pa, 0.01);  // constant envelope 0.1
  const PaMetrics m = compute_pa_metrics(out, pa);
  CHECK(m.output_power == doctest::Approx(0.0099966678).epsilon(1e-6));
  CHECK(m.obo_db == doctest::Approx(10.0014476).epsilon(1e-6));
  CHECK(m.eta_pa == doctest::Approx(0.65 * std::pow(10.0, -m.obo_db / 20.0)).epsilon(1e-12));
  CHECK(m.p_dc == doctest::Approx(m.output_power / m.eta_pa).epsilon(1e-12));
  CHECK(m.papr_tx_db == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("evm measures only the residual after the best linear fit") {
  Rng rng(9);
  const CVec x = rng.cgaussian_vector(256);
  CVec z = rng.cgaussian_vector(256);
  // Orthogonalize the error against the reference.
  const Complex proj = x.dot(z) / x.squaredNorm();
  CVec e = z - proj * x;
  const Complex a(1.7, -0.4);
  e *= 0.1 * std::abs(a) * x.norm() / e.norm();
  const CVec y = a * x + e;

  CHECK(compute_evm(x, y) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(compute_sir_db(x, y) == doctest::Approx(20.0).epsilon(1e-6));

  // A pure complex rescaling carries no distortion.
  CHECK(compute_evm(x, Complex(0.3, 1.1) * x) < 1e-12);
  CHECK(compute_sir_db(x, Complex(0.3, 1.1) * x) == doctest::Approx(100.0));
}

TEST_CASE("operating point search brackets the EVM cap") {
  Rng rng(13);
  const CVec x = rng.cgaussian_vector(1024);
  PaModel pa;
  pa.p_sat = 0.05;
  const double p_lo = dbm_to_watt(12.0);
  const double p_hi = dbm_to_watt(17.0);

  auto evm_at = [&](double p) {
    const PaOutput out = amplify(x, pa, p);
    return compute_evm(out.reference, out.output);
  };
  const double evm_lo = evm_at(p_lo);
  const double evm_hi = evm_at(p_hi);
  REQUIRE(evm_lo < evm_hi);  // distortion grows with drive

  SUBCASE("cap binds inside the region") {
    const double cap = 0.5 * (evm_lo + evm_hi);
    const double p = find_operating_point(x, pa, cap, p_lo, p_hi);
    CHECK(p >= p_lo);
    CHECK(p <= p_hi);
    CHECK(evm_at(p) <= cap);
    // 0.02 dB above the returned point the cap must already be violated.
    CHECK(evm_at(p * std::pow(10.0, 0.002)) > cap);
  }
  SUBCASE("cap slack at the top returns the upper edge") {
    const double p = find_operating_point(x, pa, evm_hi * 1.05, p_lo, p_hi);
    CHECK(p == doctest::Approx(p_hi));
  }
  SUBCASE("cap below the lower edge is infeasible") {
    CHECK_THROWS_AS(find_operating_point(x, pa, evm_lo * 0.9, p_lo, p_hi), infeasible_error);
  }
}
