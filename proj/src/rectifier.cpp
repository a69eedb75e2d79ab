// SPDX-License-Identifier: MIT
#include "swipt/rectifier.hpp"

#include <cmath>

namespace swipt {

void validate(const DiodeParams& d) {
  if (d.i_sat <= 0 || d.i_bv <= 0 || d.v_breakdown <= 0 || d.ideality <= 0 ||
      d.v_thermal <= 0 || d.r_load <= 0 || d.r_source <= 0)
    throw std::invalid_argument("diode parameters must be positive");
  if (breakdown_pole(d) <= 0)
    throw std::invalid_argument("breakdown pole must be positive; check i_sat/i_bv/v_breakdown");
}

double log_exponential_moment(const CVec& signal, const DiodeParams& d) {
  if (signal.size() == 0) throw std::invalid_argument("empty signal");
  const double alpha = d.alpha();
  Vec mag = signal.cwiseAbs();
  const double m = alpha * mag.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mag.size(); ++i) acc += std::exp(alpha * mag(i) - m);
  return m + std::log(acc / static_cast<double>(mag.size()));
}

double breakdown_pole(const DiodeParams& d) {
  return 0.5 * (d.v_breakdown + d.nvt() * std::log(d.i_sat / d.i_bv));
}

double log_balance_lhs(double v, const DiodeParams& d) {
  const double nvt = d.nvt();
  const double u = (d.i_bv / d.i_sat) * std::exp((2.0 * v - d.v_breakdown) / nvt);
  if (u >= 1.0) throw std::invalid_argument("balance undefined at or beyond the breakdown pole");
  return v / nvt + std::log1p(v / (d.r_load * d.i_sat)) - std::log1p(-u);
}

RectifierResult solve_vout(double log_phi, const DiodeParams& d) {
  validate(d);
  RectifierResult res;
  res.log_phi = log_phi;
  // Jensen gives log_phi >= 0 for any envelope; tolerate rounding just below.
  if (log_phi < 0) {
    if (log_phi < -1e-9) throw std::invalid_argument("log_phi must be nonnegative");
    log_phi = 0.0;
  }
  if (log_phi == 0.0) return res;

  const double hi_guard = breakdown_pole(d) - 1e-6;
  if (log_balance_lhs(hi_guard, d) < log_phi) {
    res.v_out = hi_guard;
    res.breakdown = true;
    return res;
  }

  double lo = 0.0, hi = hi_guard;
  // The LHS is strictly increasing, so plain bisection converges; run until
  // both the voltage bracket and the log-domain residual are tight.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_balance_lhs(mid, d) < log_phi) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-9 && std::abs(log_balance_lhs(0.5 * (lo + hi), d) - log_phi) <= 1e-9)
      break;
  }
  res.v_out = 0.5 * (lo + hi);
  return res;
}

RectifierResult rectify(const CVec& signal, const DiodeParams& d) {
  validate(d);
  const double p = mean_power(signal);
  if (p <= 0) {
    RectifierResult res;
    return res;
  }
  RectifierResult res = solve_vout(log_exponential_moment(signal, d), d);
  res.p_rf_in = p;
  res.eta = (res.v_out * res.v_out / d.r_load) / p;
  return res;
}

}  // namespace swipt
