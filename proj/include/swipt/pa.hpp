// SPDX-License-Identifier: MIT
#pragma once

#include "swipt/types.hpp"

namespace swipt {

// Soft-limiting amplifier: memoryless Rapp AM/AM, phase preserved.
struct PaModel {
  double p_sat = 0.1;       // saturated output power, W
  double gain = 1.0;        // small-signal amplitude gain
  double smoothness = 3.0;  // Rapp knee parameter p
  double eta_max = 0.65;    // drain efficiency at saturation
};

struct PaOutput {
  CVec output;     // amplified samples
  CVec reference;  // input samples after scaling to the commanded drive
  double input_power = 0.0;
};

// AM/AM curve for a single envelope amplitude.
double rapp_am_am(double amplitude, const PaModel& pa);

// Scales the signal to the requested average input power, then applies the
// AM/AM curve per sample.
PaOutput amplify(const CVec& signal, const PaModel& pa, double input_power);

// Drain efficiency eta_max * 10^(-obo/20); class-B-like backoff law.
double drain_efficiency(double obo_db, double eta_max);

// Error magnitude after removing the best complex linear fit of the
// reference into the distorted signal: sqrt(||y - a x||^2 / ||a x||^2).
double compute_evm(const CVec& reference, const CVec& distorted);

// -20 log10(EVM), capped at 100 dB for vanishing distortion.
double compute_sir_db(const CVec& reference, const CVec& distorted);

struct PaMetrics {
  double input_power = 0.0;
  double output_power = 0.0;
  double obo_db = 0.0;
  double eta_pa = 0.0;
  double p_dc = 0.0;
  double evm = 0.0;
  double sir_db = 0.0;
  double papr_tx_db = 0.0;  // PAPR of the driving waveform
};

PaMetrics compute_pa_metrics(const PaOutput& out, const PaModel& pa);

// Largest average input power within [p_lo_w, p_hi_w] whose EVM stays at or
// below evm_max, located by bisection in the dB domain to a bracket below
// 0.01 dB.  EVM is monotone in drive for the Rapp curve.  Throws
// infeasible_error when even p_lo_w violates the cap.
double find_operating_point(const CVec& signal, const PaModel& pa, double evm_max,
                            double p_lo_w, double p_hi_w);

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

}  // namespace swipt
