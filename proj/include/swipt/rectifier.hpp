// SPDX-License-Identifier: MIT
#pragma once

#include "swipt/types.hpp"

namespace swipt {

// Single-diode envelope rectifier with DC load, including reverse
// breakdown.  alpha() scales envelope volts into diode exponent units; at
// the defaults it is roughly 259 per volt, so exponential moments are only
// ever handled through their logarithm.
struct DiodeParams {
  double i_sat = 3e-6;       // forward saturation current, A
  double i_bv = 3e-4;        // breakdown knee current, A
  double v_breakdown = 3.8;  // breakdown voltage, V
  double ideality = 1.05;
  double v_thermal = 0.026;  // V
  double r_load = 10e3;      // Ohm
  double r_source = 50.0;    // Ohm

  double alpha() const { return std::sqrt(r_source) / (ideality * v_thermal); }
  double nvt() const { return ideality * v_thermal; }
};

void validate(const DiodeParams& d);

// ln[(1/N) sum exp(alpha |y[n]|)], evaluated in tared (max-shifted) form so
// peaks of several volts stay finite.
double log_exponential_moment(const CVec& signal, const DiodeParams& d);

// Output voltage where the load line meets the breakdown pole:
// (v_breakdown + n vt ln(i_sat / i_bv)) / 2.  The balance equation diverges
// there, so every root search stays strictly below it.
double breakdown_pole(const DiodeParams& d);

// ln of the left-hand side of the rectifier balance
//   exp(v/nvt) * (1 + v/(r_load i_sat)) / (1 - (i_bv/i_sat) exp((2v - v_b)/nvt))
// valid for 0 <= v < breakdown_pole.
double log_balance_lhs(double v, const DiodeParams& d);

struct RectifierResult {
  double v_out = 0.0;
  double eta = 0.0;       // (v_out^2 / r_load) / p_rf_in
  double p_rf_in = 0.0;   // mean |y|^2
  double log_phi = 0.0;   // ln of the exponential envelope moment
  bool breakdown = false; // root search hit the pole guard; v_out clamped
};

// Solves log_balance_lhs(v) = log_phi by bisection on [0, pole).  The
// bracket shrinks below 1e-9 V and the log-domain residual below 1e-8
// unless the breakdown clamp engages.
RectifierResult solve_vout(double log_phi, const DiodeParams& d);

// Full harvest step for a received envelope waveform.
RectifierResult rectify(const CVec& signal, const DiodeParams& d);

}  // namespace swipt
