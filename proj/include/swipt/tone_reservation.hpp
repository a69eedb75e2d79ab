// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <vector>

#include "swipt/waveform.hpp"

namespace swipt {

struct TrParams {
  // Smoothing sharpness is chosen per iterate as scale / max|z| with the
  // scale growing linearly in the iterate, so the soft-max gap starts as a
  // fixed fraction of the current peak and tightens as descent progresses.
  double sharpness_scale = 30.0;
  double step = 0.5;
  int max_iters = 100;
  double grad_tol = 0.0;  // 0 disables the gradient-norm stop
  int oversampling = 4;
};

struct TrResult {
  CVec c;  // correction spectrum, support limited to the reserved tones
  double papr_before_db = 0.0;
  double papr_after_db = 0.0;
  double power_bound = 0.0;
  int iterations = 0;
  std::vector<double> trajectory_db;  // true oversampled PAPR per iterate
};

// Correction power budget: ||c||^2 < (1/2) * k_tr / (k_total - k_tr) * ||x||^2.
double tr_power_bound(const CVec& freq_symbols, const SubcarrierPartition& partition);

// Soft maximum (1/eps) * log sum exp(eps * z); always within [max z,
// max z + log(n)/eps].  Evaluated in tared form so large eps*z cannot
// overflow.
double smoothed_peak(const Vec& magnitudes, double eps);

// Gradient of the smoothed peak of |idft(x + c)| with respect to the real
// and imaginary parts of c, packed as a complex vector (d/dRe + j d/dIm)
// and zeroed outside the reserved tones.
CVec tr_gradient(const CVec& freq_symbols, const CVec& c,
                 const SubcarrierPartition& partition, double eps,
                 int oversampling);

// Projected gradient descent on the smoothed peak with momentum
// extrapolation, adaptive sharpness, step halving on objective increase,
// and radial projection onto the power ball.  Returns the best iterate by
// true (oversampled) peak; never worse than the uncorrected frame.
TrResult tr_optimize_gd(const CVec& freq_symbols, const SubcarrierPartition& partition,
                        const TrParams& params, std::uint64_t seed);

// Reference solver: projected subgradient descent on the exact peak with
// diminishing steps.  Slower per unit progress but free of smoothing bias;
// used to cross-check tr_optimize_gd.
TrResult tr_optimize_minimax(const CVec& freq_symbols, const SubcarrierPartition& partition,
                             int iters, std::uint64_t seed, int oversampling = 4);

}  // namespace swipt
