// SPDX-License-Identifier: MIT
#pragma once

#include <vector>

#include "swipt/types.hpp"

namespace swipt {

// Contiguous three-way split of the subcarrier axis, ascending:
// [reserved tones | index-modulated | QAM].  Blocks may be empty.
struct SubcarrierPartition {
  int k_total = 0;
  std::vector<int> set_tr;
  std::vector<int> set_im;
  std::vector<int> set_qam;

  int k_tr() const { return static_cast<int>(set_tr.size()); }
  int k_im() const { return static_cast<int>(set_im.size()); }
  int k_qam() const { return static_cast<int>(set_qam.size()); }
};

// Throws std::invalid_argument unless 0 <= k_tr, 0 <= k_im, k_im even and
// k_tr + k_im <= k_total.
SubcarrierPartition build_partition(int k_total, int k_tr, int k_im);

// The two-symbol alphabet used on index-modulated subcarriers.  The
// amplitude sqrt(2/n_rx) makes the receive-side coherent sum independent of
// the array size once all antennas are combined.
struct ImConfig {
  double amplitude = 1.0;
  double phase = 0.0;

  Complex symbol() const { return std::polar(amplitude, phase); }
};

ImConfig make_im_config(int n_rx, double phase = 0.0);

// Gray-mapped square QAM, unit average symbol energy.  bits_per_symbol must
// be even and positive; bits.size() must divide evenly into symbols.
CVec map_qam(const std::vector<int>& bits, int bits_per_symbol);

// One bit per two-subcarrier subblock: bit 0 activates the first subcarrier
// of the block, bit 1 the second, always with the same alphabet symbol.
// Returns 2 * bits.size() subcarrier values.
CVec map_im(const std::vector<int>& bits, const ImConfig& im);

// Zero-padded unitary inverse DFT of size oversampling * K.  Sample energy
// equals symbol energy (Parseval).  K must be even when oversampling > 1.
CVec ofdm_modulate(const CVec& spectrum, int oversampling);

// Exact inverse of ofdm_modulate: unitary forward DFT and removal of the
// oversampling guard band.  time.size() must be a multiple of k_total.
CVec ofdm_demodulate(const CVec& time, int k_total);

// max |s|^2 / mean |s|^2.  Throws on an all-zero signal.
double papr_linear(const CVec& signal);
double papr_db(const CVec& signal);

// Empirical P(value > threshold) per threshold.
std::vector<double> ccdf(const std::vector<double>& values,
                         const std::vector<double>& thresholds);

// Frequency-domain frame before amplification.  stream_symbols columns are
// ordered [set_im | set_qam]; reserved tones bypass precoding and are laid
// down per transmit antenna as-is.
struct FrequencyFrame {
  SubcarrierPartition partition;
  CMat stream_symbols;  // n_streams x (k_im + k_qam)
  CMat tr_symbols;      // n_tx x k_tr
  CMat antenna_grid;    // n_tx x k_total
};

// precoders[k] is the n_tx x n_streams matrix applied on subcarrier k;
// entries for reserved tones are ignored.
FrequencyFrame assemble_frame(const MimoConfig& mimo,
                              const SubcarrierPartition& partition,
                              const CMat& stream_symbols,
                              const CMat& tr_symbols,
                              const std::vector<CMat>& precoders);

}  // namespace swipt
