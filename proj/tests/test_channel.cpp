// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "swipt/channel.hpp"
#include "swipt/rng.hpp"

using namespace swipt;

TEST_CASE("default profile decays 3 dB per tap at unit total power") {
  const auto pdp = default_pdp(8, 3.0);
  REQUIRE(pdp.size() == 8);
  double total = 0.0;
  for (const auto& t : pdp) total += t.power;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (int l = 0; l + 1 < 8; ++l) {
    CHECK(pdp[l].delay_samples == l);
    CHECK(pdp[l + 1].power / pdp[l].power == doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-12));
  }
}

TEST_CASE("profile files parse, normalize, and reject nonsense") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto good = dir / "pdp_good.txt";
  {
    std::ofstream out(good);
    out << "# delay_samples power_linear\n";
    out << "0 2.0\n";
    out << "3 1.0   # late echo\n";
    out << "\n";
  }
  const auto pdp = load_pdp(good.string());
  REQUIRE(pdp.size() == 2);
  CHECK(pdp[0].power == doctest::Approx(2.0 / 3.0));
  CHECK(pdp[1].power == doctest::Approx(1.0 / 3.0));
  CHECK(pdp[1].delay_samples == 3);

  const auto bad = dir / "pdp_bad.txt";
  {
    std::ofstream out(bad);
    out << "0 -1.0\n";
  }
  CHECK_THROWS(load_pdp(bad.string()));
  CHECK_THROWS(load_pdp((dir / "pdp_missing.txt").string()));
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

TEST_CASE("single-tap channel is flat and path loss scales the energy") {
  ChannelConfig cfg;
  cfg.pdp = default_pdp(1, 0.0);
  cfg.path_loss_db = 45.0;

  const auto chan = generate_channel(cfg, 4, 4, 64, 5);
  for (int k : {1, 17, 63}) CHECK((chan.freq[k] - chan.freq[0]).norm() < 1e-14);

  double acc = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto c = generate_channel(cfg, 4, 4, 1, seed);
    acc += c.taps[0].squaredNorm();
    count += 16;
  }
  // E|h|^2 = 10^(-4.5) per entry.
  CHECK(acc / count == doctest::Approx(std::pow(10.0, -4.5)).epsilon(0.15));
}

TEST_CASE("frequency response is the DFT of the tap gains over their delays") {
  ChannelConfig cfg;
  cfg.pdp = {{0, 0.5}, {3, 0.5}};
  cfg.path_loss_db = 0.0;
  const int k_total = 32;
  const auto chan = generate_channel(cfg, 2, 2, k_total, 77);
  for (int k = 0; k < k_total; ++k) {
    CMat expect = chan.taps[0] +
                  chan.taps[1] * std::polar(1.0, -2.0 * std::numbers::pi * k * 3.0 / k_total);
    CHECK((chan.freq[k] - expect).norm() < 1e-13);
  }
}

TEST_CASE("identity channel precodes to a scaled identity") {
  const CMat h = CMat::Identity(2, 2);
  const CMat w = rzf_precoder(h, 1.0, 2);
  // H^H (H H^H + I)^{-1} = I/2, then unit Frobenius normalization.
  CHECK((w - CMat::Identity(2, 2) / std::sqrt(2.0)).norm() < 1e-12);
}

TEST_CASE("vanishing regularization zero-forces the cross streams") {
  Rng rng(99);
  CMat h(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) h(r, c) = rng.cgaussian();

  const CMat w = rzf_precoder(h, 1e-12, 4);
  const CMat prod = h * w;
  // Equalized: a common positive real factor on the diagonal, nothing off it.
  const double diag0 = prod(0, 0).real();
  CHECK(diag0 > 0.0);
  for (int r = 0; r < 4; ++r) {
    CHECK(std::abs(prod(r, r).imag()) < 1e-8 * diag0);
    CHECK(prod(r, r).real() == doctest::Approx(diag0).epsilon(1e-6));
    for (int c = 0; c < 4; ++c)
      if (r != c) CHECK(std::abs(prod(r, c)) < 1e-6 * diag0);
  }

  // The coherent receive-side sum of an equal-symbol stream vector survives
  // zero-forcing: H W (s,...,s) = diag0 * (s,...,s).
  const CVec s = CVec::Ones(4) * Complex(0.3, 0.4);
  CHECK(((prod * s) - diag0 * s).norm() < 1e-5 * s.norm());
}

TEST_CASE("huge regularization falls back to the matched filter") {
  Rng rng(101);
  CMat h(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) h(r, c) = rng.cgaussian();
  const CMat w = rzf_precoder(h, 1e9, 3);
  const CMat mf = h.adjoint() / h.adjoint().norm();
  CHECK((w - mf).norm() < 1e-6);
}

TEST_CASE("effective gain averages the post-precoding channel power") {
  ChannelConfig cfg;
  cfg.pdp = default_pdp(3, 3.0);
  cfg.path_loss_db = 10.0;
  const auto chan = generate_channel(cfg, 2, 2, 8, 7);
  const auto w = precoders_for(chan, 0.1, 2);
  double acc = 0.0;
  for (int k = 0; k < 8; ++k) acc += (chan.freq[k] * w[k]).squaredNorm();
  CHECK(effective_gain(chan, w) == doctest::Approx(acc / (8.0 * 2.0)).epsilon(1e-12));
}

TEST_CASE("propagation matches the per-subcarrier product plus noise") {
  // Hand-built identity channel: received grid must equal the sent grid.
  ChannelRealization chan;
  const int k_total = 16;
  chan.taps = {CMat::Identity(2, 2)};
  chan.delays = {0};
  chan.freq.assign(k_total, CMat::Identity(2, 2));

  Rng rng(55);
  CMat grid(2, k_total);
  for (int r = 0; r < 2; ++r)
    for (int k = 0; k < k_total; ++k) grid(r, k) = rng.cgaussian();

  const ReceivedFrame rx = propagate(grid, chan, 0.0, 4, 9);
  CHECK((rx.grid - grid).norm() < 1e-14);
  REQUIRE(rx.time.size() == 2);
  for (int r = 0; r < 2; ++r) {
    const CVec expect = ofdm_modulate(grid.row(r).transpose(), 4);
    CHECK((rx.time[r] - expect).norm() < 1e-12);
    // Unitary modulation: time energy equals subcarrier energy.
    CHECK(std::abs(rx.time[r].squaredNorm() - grid.row(r).squaredNorm()) < 1e-10);
  }

  // Pure-noise propagation reproduces the commanded noise power.
  CMat zeros = CMat::Zero(4, 1024);
  ChannelRealization chan4;
  chan4.taps = {CMat::Identity(4, 4)};
  chan4.delays = {0};
  chan4.freq.assign(1024, CMat::Identity(4, 4));
  const ReceivedFrame quiet = propagate(zeros, chan4, 1e-4, 1, 123);
  CHECK(quiet.grid.squaredNorm() / (4.0 * 1024.0) == doctest::Approx(1e-4).epsilon(0.1));
}

TEST_CASE("power splitter scales branches and sums the harvest coherently") {
  Rng rng(66);
  std::vector<CVec> branches{rng.cgaussian_vector(8), rng.cgaussian_vector(8)};
  const double rho = 0.36;
  const SplitOutputs out = power_split(branches, rho);
  REQUIRE(out.id.size() == 2);
  CHECK((out.id[0] - 0.6 * branches[0]).norm() < 1e-14);
  CHECK((out.id[1] - 0.6 * branches[1]).norm() < 1e-14);
  const CVec expect_eh = 0.8 * (branches[0] + branches[1]);
  CHECK((out.eh - expect_eh).norm() < 1e-14);
  CHECK_THROWS_AS(power_split(branches, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(power_split({}, 0.5), std::invalid_argument);
}
