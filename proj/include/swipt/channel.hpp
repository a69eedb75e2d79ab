// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swipt/waveform.hpp"

namespace swipt {

struct Tap {
  int delay_samples = 0;
  double power = 1.0;  // linear, normalized across the profile
};

using PowerDelayProfile = std::vector<Tap>;

// Exponentially decaying profile, decay_db_per_tap of attenuation per tap,
// unit total power.
PowerDelayProfile default_pdp(int n_taps = 8, double decay_db_per_tap = 3.0);

// Plain text, one "delay_samples power_linear" pair per line; '#' starts a
// comment.  Powers are normalized to unit sum on load.
PowerDelayProfile load_pdp(const std::string& path);

struct ChannelConfig {
  PowerDelayProfile pdp = default_pdp();
  double path_loss_db = 45.0;  // applied to the tap gains
};

struct ChannelRealization {
  std::vector<CMat> taps;  // one n_rx x n_tx matrix per profile tap
  std::vector<int> delays;
  std::vector<CMat> freq;  // one n_rx x n_tx response per subcarrier
};

// I.i.d. circularly symmetric Gaussian tap gains scaled by tap power and
// path loss; frequency response by DFT across the delays.  Deterministic
// per seed.
ChannelRealization generate_channel(const ChannelConfig& cfg, int n_rx, int n_tx,
                                    int k_total, std::uint64_t seed);

// Regularized zero-forcing: first n_streams columns of H^H (H H^H + delta I)^-1,
// scaled to unit Frobenius norm.
CMat rzf_precoder(const CMat& h, double delta, int n_streams);

std::vector<CMat> precoders_for(const ChannelRealization& chan, double delta, int n_streams);

// Average per-stream channel power after precoding:
// (1 / (K n_streams)) sum_k ||H_k W_k||_F^2.
double effective_gain(const ChannelRealization& chan, const std::vector<CMat>& precoders);

struct ReceivedFrame {
  CMat grid;               // n_rx x k_total, post-channel, noise included
  std::vector<CVec> time;  // oversampled per receive antenna
};

// Per-subcarrier matrix multiply, additive white Gaussian noise of variance
// noise_power per receive antenna, then oversampled unitary inverse DFT.
ReceivedFrame propagate(const CMat& antenna_grid, const ChannelRealization& chan,
                        double noise_power, int oversampling, std::uint64_t seed);

struct SplitOutputs {
  std::vector<CVec> id;  // sqrt(rho) * y_i, one branch per antenna
  CVec eh;               // sqrt(1 - rho) * sum_i y_i
};

SplitOutputs power_split(const std::vector<CVec>& received, double rho);

}  // namespace swipt
