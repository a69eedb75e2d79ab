// SPDX-License-Identifier: MIT
#include "swipt/tone_reservation.hpp"

#include <cmath>
#include <limits>

#include "swipt/rng.hpp"

namespace swipt {

double tr_power_bound(const CVec& freq_symbols, const SubcarrierPartition& partition) {
  const int k = partition.k_total;
  const int k_tr = partition.k_tr();
  if (freq_symbols.size() != k) throw std::invalid_argument("frame size mismatch");
  if (k_tr >= k) throw std::invalid_argument("reserved set must leave data subcarriers");
  return 0.5 * static_cast<double>(k_tr) / static_cast<double>(k - k_tr) *
         freq_symbols.squaredNorm();
}

double smoothed_peak(const Vec& magnitudes, double eps) {
  if (magnitudes.size() == 0) throw std::invalid_argument("empty magnitude vector");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double m = magnitudes.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < magnitudes.size(); ++i)
    acc += std::exp(eps * (magnitudes(i) - m));
  return m + std::log(acc) / eps;
}

namespace {

// Soft-max weights of eps * |z| together with the unit phases of z; this is
// the time-domain factor shared by the gradient and the subgradient.
CVec weighted_phases(const CVec& z, double eps) {
  const Eigen::Index n = z.size();
  Vec mag = z.cwiseAbs();
  const double m = mag.maxCoeff();
  Vec w(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    w(i) = std::exp(eps * (mag(i) - m));
    total += w(i);
  }
  CVec u = CVec::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mag(i) > 0.0) u(i) = (w(i) / total) * (z(i) / mag(i));
  }
  return u;
}

CVec mask_to_support(CVec full, const SubcarrierPartition& partition) {
  CVec out = CVec::Zero(full.size());
  for (int k : partition.set_tr) out(k) = full(k);
  return out;
}

void project_to_ball(CVec& c, double bound) {
  const double p = c.squaredNorm();
  if (p >= bound) c *= 0.999 * std::sqrt(bound / p);
}

}  // namespace

CVec tr_gradient(const CVec& freq_symbols, const CVec& c,
                 const SubcarrierPartition& partition, double eps,
                 int oversampling) {
  if (c.size() != freq_symbols.size()) throw std::invalid_argument("c size mismatch");
  CVec z = ofdm_modulate(freq_symbols + c, oversampling);
  CVec u = weighted_phases(z, eps);
  // The modulator is z = U * pad(x + c) with U unitary, so the adjoint is
  // exactly the demodulator.
  CVec g = ofdm_demodulate(u, static_cast<int>(freq_symbols.size()));
  return mask_to_support(std::move(g), partition);
}

TrResult tr_optimize_gd(const CVec& freq_symbols, const SubcarrierPartition& partition,
                        const TrParams& params, std::uint64_t seed) {
  const int k = partition.k_total;
  if (freq_symbols.size() != k) throw std::invalid_argument("frame size mismatch");
  const int l = params.oversampling;

  TrResult res;
  res.c = CVec::Zero(k);
  res.papr_before_db = papr_db(ofdm_modulate(freq_symbols, l));
  res.papr_after_db = res.papr_before_db;
  if (partition.k_tr() == 0) return res;

  res.power_bound = tr_power_bound(freq_symbols, partition);

  Rng rng(seed);
  CVec c = CVec::Zero(k);
  const double init_scale = std::sqrt(0.1 * res.power_bound / partition.k_tr());
  for (int idx : partition.set_tr) c(idx) = init_scale * rng.cgaussian();
  CVec c_prev = c;

  CVec best_c = CVec::Zero(k);  // c = 0 stays a candidate, securing no regression
  double best_peak = ofdm_modulate(freq_symbols, l).cwiseAbs().maxCoeff();

  double alpha = params.step;
  for (int it = 0; it < params.max_iters; ++it) {
    // Momentum extrapolation; the smoothed problem is convex (log-sum-exp of
    // magnitudes of an affine map), so the accelerated iteration applies.
    // The extrapolated point is projected so every iterate stays feasible.
    const double beta = static_cast<double>(it) / (it + 3.0);
    CVec y = c + beta * (c - c_prev);
    project_to_ball(y, res.power_bound);
    CVec z = ofdm_modulate(freq_symbols + y, l);
    const double peak = z.cwiseAbs().maxCoeff();
    if (peak < best_peak) {
      best_peak = peak;
      best_c = y;
    }
    res.trajectory_db.push_back(papr_db(z));
    res.iterations = it + 1;

    // Sharpness continuation: the soft-max gap is log(n)/eps, so growing the
    // scale with the iterate shrinks the band the smoothed objective cannot
    // resolve below a fraction of a dB by the end of the budget.
    const double scale = params.sharpness_scale * (1.0 + static_cast<double>(it) / 25.0);
    const double eps = scale / peak;
    const double f_cur = smoothed_peak(z.cwiseAbs(), eps);
    CVec u = weighted_phases(z, eps);
    CVec g = mask_to_support(ofdm_demodulate(u, k), partition);
    const double gnorm = g.norm();
    if (params.grad_tol > 0.0 && gnorm <= params.grad_tol) break;

    // Let the step recover after earlier halvings; the line search below
    // re-shrinks it whenever the landscape demands.
    alpha = std::min(params.step, 2.0 * alpha);
    bool accepted = false;
    while (alpha * gnorm > 1e-9 * std::max(1.0, c.norm())) {
      CVec c_try = y - alpha * g;
      project_to_ball(c_try, res.power_bound);
      CVec z_try = ofdm_modulate(freq_symbols + c_try, l);
      const double try_peak = z_try.cwiseAbs().maxCoeff();
      if (try_peak < best_peak) {
        best_peak = try_peak;
        best_c = c_try;
      }
      if (smoothed_peak(z_try.cwiseAbs(), eps) <= f_cur) {
        c_prev = c;
        c = std::move(c_try);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    // Rejected extrapolation kills the momentum for the next round.
    if (!accepted) c_prev = c;
  }

  res.c = best_c;
  res.papr_after_db = papr_db(ofdm_modulate(freq_symbols + best_c, l));
  return res;
}

TrResult tr_optimize_minimax(const CVec& freq_symbols, const SubcarrierPartition& partition,
                             int iters, std::uint64_t seed, int oversampling) {
  const int k = partition.k_total;
  if (freq_symbols.size() != k) throw std::invalid_argument("frame size mismatch");
  const int l = oversampling;

  TrResult res;
  res.c = CVec::Zero(k);
  res.papr_before_db = papr_db(ofdm_modulate(freq_symbols, l));
  res.papr_after_db = res.papr_before_db;
  if (partition.k_tr() == 0) return res;

  res.power_bound = tr_power_bound(freq_symbols, partition);

  Rng rng(seed);
  CVec c = CVec::Zero(k);
  const double init_scale = std::sqrt(0.1 * res.power_bound / partition.k_tr());
  for (int idx : partition.set_tr) c(idx) = init_scale * rng.cgaussian();

  CVec best_c = CVec::Zero(k);
  double best_peak = ofdm_modulate(freq_symbols, l).cwiseAbs().maxCoeff();

  for (int it = 0; it < iters; ++it) {
    CVec z = ofdm_modulate(freq_symbols + c, l);
    Eigen::Index peak_at = 0;
    const double peak = z.cwiseAbs().maxCoeff(&peak_at);
    if (peak < best_peak) {
      best_peak = peak;
      best_c = c;
    }
    res.trajectory_db.push_back(papr_db(z));
    res.iterations = it + 1;

    // Subgradient of max |z| through the linear map: a single weighted
    // impulse at the argmax sample.
    CVec impulse = CVec::Zero(z.size());
    impulse(peak_at) = z(peak_at) / std::abs(z(peak_at));
    CVec g = mask_to_support(ofdm_demodulate(impulse, k), partition);
    const double step = 0.5 / std::sqrt(static_cast<double>(it + 1));
    c -= step * g;
    project_to_ball(c, res.power_bound);
  }
  CVec z = ofdm_modulate(freq_symbols + c, l);
  if (z.cwiseAbs().maxCoeff() < best_peak) best_c = c;

  res.c = best_c;
  res.papr_after_db = papr_db(ofdm_modulate(freq_symbols + best_c, l));
  return res;
}

}  // namespace swipt
