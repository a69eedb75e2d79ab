// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <bit>
#include <cmath>

#include "swipt/rng.hpp"
#include "swipt/waveform.hpp"

using namespace swipt;

TEST_CASE("partition blocks are contiguous and ascending") {
  const auto p = build_partition(16, 4, 6);
  CHECK(p.k_total == 16);
  REQUIRE(p.k_tr() == 4);
  REQUIRE(p.k_im() == 6);
  REQUIRE(p.k_qam() == 6);
  for (int j = 0; j < 4; ++j) CHECK(p.set_tr[j] == j);
  for (int j = 0; j < 6; ++j) CHECK(p.set_im[j] == 4 + j);
  for (int j = 0; j < 6; ++j) CHECK(p.set_qam[j] == 10 + j);
}

TEST_CASE("partition rejects invalid splits") {
  CHECK_THROWS_AS(build_partition(16, 0, 3), std::invalid_argument);   // odd k_im
  CHECK_THROWS_AS(build_partition(16, 10, 8), std::invalid_argument);  // overflow
  CHECK_THROWS_AS(build_partition(16, -1, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_partition(0, 0, 0), std::invalid_argument);
  CHECK_NOTHROW(build_partition(16, 16, 0));
  CHECK_NOTHROW(build_partition(16, 0, 0));
}

TEST_CASE("qpsk constellation points and energy") {
  const double s = 1.0 / std::sqrt(2.0);
  auto one = [](int b0, int b1) { return map_qam({b0, b1}, 2)(0); };
  CHECK(one(0, 0).real() == doctest::Approx(-s));
  CHECK(one(0, 0).imag() == doctest::Approx(-s));
  CHECK(one(1, 1).real() == doctest::Approx(s));
  CHECK(one(1, 1).imag() == doctest::Approx(s));
  CHECK(one(1, 0).real() == doctest::Approx(s));
  CHECK(one(1, 0).imag() == doctest::Approx(-s));
  CHECK(std::abs(one(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("16-qam is gray mapped with unit average energy") {
  // First axis_bits bits drive the in-phase level, the rest the quadrature.
  const Complex sym = map_qam({1, 0, 0, 1}, 4)(0);
  CHECK(sym.real() == doctest::Approx(3.0 / std::sqrt(10.0)));
  CHECK(sym.imag() == doctest::Approx(-1.0 / std::sqrt(10.0)));

  double energy = 0.0;
  for (int v = 0; v < 16; ++v) {
    std::vector<int> bits{(v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1};
    energy += std::norm(map_qam(bits, 4)(0));
  }
  CHECK(energy / 16.0 == doctest::Approx(1.0).epsilon(1e-12));

  // Gray adjacency per axis: neighbouring amplitude levels differ in one bit.
  for (int axis_bits : {1, 2, 3}) {
    const unsigned n = 1u << axis_bits;
    std::vector<unsigned> code_of_rank(n);
    for (unsigned g = 0; g < n; ++g) {
      unsigned rank = g;
      for (unsigned shift = 1; shift < 8 * sizeof(unsigned); shift <<= 1) rank ^= rank >> shift;
      code_of_rank[rank] = g;
    }
    for (unsigned r = 0; r + 1 < n; ++r)
      CHECK(std::popcount(code_of_rank[r] ^ code_of_rank[r + 1]) == 1);
  }
}

TEST_CASE("qam input validation") {
  CHECK_THROWS_AS(map_qam({0, 1, 0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(map_qam({0, 1}, 3), std::invalid_argument);
  CHECK_THROWS_AS(map_qam({0, 2}, 2), std::invalid_argument);
}

TEST_CASE("index modulation activates one subcarrier per pair") {
  const ImConfig im = make_im_config(4);
  CHECK(im.amplitude == doctest::Approx(std::sqrt(0.5)));
  const Complex s = im.symbol();
  const CVec v = map_im({0, 1, 1}, im);
  REQUIRE(v.size() == 6);
  CHECK(v(0) == s);
  CHECK(v(1) == Complex(0, 0));
  CHECK(v(2) == Complex(0, 0));
  CHECK(v(3) == s);
  CHECK(v(5) == s);
  // The receive-side combining argument rests on this sum being independent
  // of the chosen indices.
  CHECK(std::abs(v.sum() - 3.0 * s) < 1e-15);
}

TEST_CASE("flat spectrum modulates to an impulse") {
  const CVec ones = CVec::Ones(8);
  const CVec t = ofdm_modulate(ones, 1);
  CHECK(std::abs(t(0) - Complex(std::sqrt(8.0), 0)) < 1e-12);
  for (int n = 1; n < 8; ++n) CHECK(std::abs(t(n)) < 1e-12);
  CHECK(papr_linear(t) == doctest::Approx(8.0));
  CHECK(papr_db(t) == doctest::Approx(9.0309).epsilon(1e-4));
}

TEST_CASE("modulate/demodulate round trip and Parseval") {
  Rng rng(17);
  for (int oversampling : {1, 2, 4, 8}) {
    const CVec x = rng.cgaussian_vector(16);
    const CVec t = ofdm_modulate(x, oversampling);
    REQUIRE(t.size() == 16 * oversampling);
    CHECK(std::abs(t.squaredNorm() - x.squaredNorm()) < 1e-10);
    const CVec back = ofdm_demodulate(t, 16);
    CHECK((back - x).norm() < 1e-10);
  }
}

TEST_CASE("papr is scale invariant and rejects degenerate input") {
  Rng rng(3);
  const CVec x = ofdm_modulate(rng.cgaussian_vector(32), 4);
  CHECK(papr_linear(x * Complex(0.0, 2.5)) == doctest::Approx(papr_linear(x)).epsilon(1e-12));
  CHECK_THROWS_AS(papr_linear(CVec()), std::invalid_argument);
  CHECK_THROWS_AS(papr_linear(CVec::Zero(4)), std::invalid_argument);
}

TEST_CASE("ccdf counts strict exceedances") {
  const auto c = ccdf({1.0, 2.0, 3.0}, {0.0, 1.5, 2.5, 3.5});
  REQUIRE(c.size() == 4);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(2.0 / 3.0));
  CHECK(c[2] == doctest::Approx(1.0 / 3.0));
  CHECK(c[3] == doctest::Approx(0.0));
}

TEST_CASE("frame assembly routes blocks as specified") {
  MimoConfig m;
  m.n_tx = 2;
  m.n_rx = 2;
  m.n_streams = 2;
  m.n_subcarriers = 6;
  m.oversampling = 1;
  const auto p = build_partition(6, 2, 2);

  std::vector<CMat> precoders(6, CMat::Identity(2, 2));
  CMat streams(2, 4);
  streams << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0),
      Complex(0, 1), Complex(0, 2), Complex(0, 3), Complex(0, 4);
  CMat tr(2, 2);
  tr << Complex(9, 9), Complex(8, 8), Complex(7, 7), Complex(6, 6);

  const auto frame = assemble_frame(m, p, streams, tr, precoders);
  // Reserved tones land verbatim, info columns in order [set_im | set_qam].
  CHECK(frame.antenna_grid(0, 0) == Complex(9, 9));
  CHECK(frame.antenna_grid(1, 1) == Complex(6, 6));
  CHECK(frame.antenna_grid(0, 2) == Complex(1, 0));
  CHECK(frame.antenna_grid(1, 2) == Complex(0, 1));
  CHECK(frame.antenna_grid(0, 5) == Complex(4, 0));

  // A non-identity precoder mixes streams into antennas.
  CMat w(2, 2);
  w << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
  precoders[3] = w;
  const auto swapped = assemble_frame(m, p, streams, tr, precoders);
  CHECK(swapped.antenna_grid(0, 3) == Complex(0, 2));
  CHECK(swapped.antenna_grid(1, 3) == Complex(2, 0));

  CHECK_THROWS_AS(assemble_frame(m, p, streams.leftCols(3), tr, precoders),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble_frame(m, build_partition(8, 2, 2), streams, tr, precoders),
                  std::invalid_argument);
}
