// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <string>

#include "swipt/allocation.hpp"
#include "swipt/channel.hpp"
#include "swipt/pa.hpp"
#include "swipt/rectifier.hpp"
#include "swipt/tone_reservation.hpp"

namespace swipt {

// Everything a run needs, JSON-loadable.  Defaults reproduce the reference
// desk setup: 1024 subcarriers at 15 kHz, 4x4 array with four streams,
// QPSK, 12-17 dBm drive region, and the measured diode card.
struct ExperimentConfig {
  MimoConfig mimo;
  int k_tr = 128;
  int k_im = 128;
  double im_phase = 0.0;
  DiodeParams diode;
  PaModel pa;
  double evm_max = 0.125;
  double drive_min_dbm = 12.0;
  double drive_max_dbm = 17.0;
  ChannelConfig channel;
  int n_taps = 8;              // generator inputs for channel.pdp
  double tap_decay_db = 3.0;
  std::string pdp_file;  // overrides channel.pdp when nonempty
  double noise_power = 1e-7;
  double rzf_delta = -1.0;  // negative selects n_streams * noise / tx_power
  double tx_power = 1.0;
  double p_min = 0.0;
  double rho = 0.5;
  TrParams tr;
  double sca_epsilon = 0.5;
  int sca_max_outer = 50;
  double calib_step = 16.0;
  int calib_trials = 20;
  bool recalibrate = true;  // re-run calibration when the solution leaves the trust region
  std::uint64_t master_seed = 1;
  int trials = 200;
  int ccdf_symbols = 1000;
  std::string output_dir = "out";

  double rzf_delta_effective() const {
    return rzf_delta >= 0 ? rzf_delta : mimo.n_streams * noise_power / tx_power;
  }
};

// Parse/serialize; load_config applies defaults for absent keys and rejects
// unknown ones.  apply_quick shrinks the frame for smoke runs.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
std::string dump_config(const ExperimentConfig& cfg);
void apply_quick(ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization; stamped into CSV headers so an
// output file pins the exact configuration that produced it.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace swipt
