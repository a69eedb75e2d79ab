// SPDX-License-Identifier: MIT
#include "swipt/pa.hpp"

#include <cmath>

#include "swipt/waveform.hpp"

namespace swipt {

namespace {

void check_model(const PaModel& pa) {
  if (pa.p_sat <= 0 || pa.gain <= 0 || pa.smoothness <= 0 || pa.eta_max <= 0 || pa.eta_max > 1)
    throw std::invalid_argument("invalid PA model");
}

}  // namespace

double rapp_am_am(double amplitude, const PaModel& pa) {
  check_model(pa);
  if (amplitude < 0) throw std::invalid_argument("amplitude must be nonnegative");
  const double a_sat = std::sqrt(pa.p_sat);
  const double driven = pa.gain * amplitude;
  const double ratio = driven / a_sat;
  const double two_p = 2.0 * pa.smoothness;
  return driven / std::pow(1.0 + std::pow(ratio, two_p), 1.0 / two_p);
}

PaOutput amplify(const CVec& signal, const PaModel& pa, double input_power) {
  check_model(pa);
  if (!(input_power > 0)) throw std::invalid_argument("input power must be positive");
  const double p = mean_power(signal);
  if (p <= 0) throw std::invalid_argument("cannot amplify an all-zero signal");

  PaOutput out;
  out.input_power = input_power;
  out.reference = signal * std::sqrt(input_power / p);
  out.output.resize(signal.size());
  for (Eigen::Index i = 0; i < signal.size(); ++i) {
    const double a = std::abs(out.reference(i));
    if (a == 0.0) {
      out.output(i) = Complex(0, 0);
    } else {
      out.output(i) = out.reference(i) * (rapp_am_am(a, pa) / a);
    }
  }
  return out;
}

double drain_efficiency(double obo_db, double eta_max) {
  if (eta_max <= 0 || eta_max > 1) throw std::invalid_argument("eta_max must lie in (0, 1]");
  return eta_max * std::pow(10.0, -obo_db / 20.0);
}

double compute_evm(const CVec& reference, const CVec& distorted) {
  if (reference.size() != distorted.size() || reference.size() == 0)
    throw std::invalid_argument("signals must share a positive length");
  const double denom = reference.squaredNorm();
  if (denom <= 0) throw std::invalid_argument("reference must be nonzero");
  const Complex a = reference.dot(distorted) / denom;  // Eigen dot conjugates the left side
  const double fit_energy = std::norm(a) * denom;
  if (fit_energy <= 0) throw std::invalid_argument("distorted signal is orthogonal to reference");
  const double err = (distorted - a * reference).squaredNorm();
  return std::sqrt(err / fit_energy);
}

double compute_sir_db(const CVec& reference, const CVec& distorted) {
  const double evm = compute_evm(reference, distorted);
  if (evm <= 0) return 100.0;
  return std::min(100.0, -20.0 * std::log10(evm));
}

PaMetrics compute_pa_metrics(const PaOutput& out, const PaModel& pa) {
  check_model(pa);
  PaMetrics m;
  m.input_power = out.input_power;
  m.output_power = mean_power(out.output);
  if (m.output_power <= 0) throw std::invalid_argument("PA output has no power");
  m.obo_db = 10.0 * std::log10(pa.p_sat / m.output_power);
  m.eta_pa = drain_efficiency(m.obo_db, pa.eta_max);
  m.p_dc = m.output_power / m.eta_pa;
  m.evm = compute_evm(out.reference, out.output);
  m.sir_db = compute_sir_db(out.reference, out.output);
  m.papr_tx_db = papr_db(out.reference);
  return m;
}

double find_operating_point(const CVec& signal, const PaModel& pa, double evm_max,
                            double p_lo_w, double p_hi_w) {
  check_model(pa);
  if (!(evm_max > 0)) throw std::invalid_argument("evm_max must be positive");
  if (!(p_lo_w > 0) || !(p_hi_w > p_lo_w))
    throw std::invalid_argument("power region must satisfy 0 < lo < hi");

  auto evm_at = [&](double p_w) {
    PaOutput out = amplify(signal, pa, p_w);
    return compute_evm(out.reference, out.output);
  };

  if (evm_at(p_lo_w) > evm_max)
    throw infeasible_error("EVM cap violated at the lower edge of the drive region");
  if (evm_at(p_hi_w) <= evm_max) return p_hi_w;

  double lo_db = watt_to_dbm(p_lo_w);
  double hi_db = watt_to_dbm(p_hi_w);
  while (hi_db - lo_db > 0.01) {
    const double mid_db = 0.5 * (lo_db + hi_db);
    if (evm_at(dbm_to_watt(mid_db)) <= evm_max) {
      lo_db = mid_db;
    } else {
      hi_db = mid_db;
    }
  }
  return dbm_to_watt(lo_db);
}

}  // namespace swipt
