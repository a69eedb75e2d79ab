// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swipt/types.hpp"

namespace swipt {

// Averages of one Monte-Carlo measurement campaign at a fixed subcarrier
// split k = (k_tr, k_im).
struct EfficiencyMeasurement {
  double eta_pa = 0.0;
  double eta_r = 0.0;
  double papr_tx_linear = 0.0;
  double papr_rx_linear = 0.0;
  double peak_eh = 0.0;  // mean of max |y_EH| across trials
  double v_out = 0.0;
  double p_dc = 0.0;
  double obo_db = 0.0;
  double sir_db = 0.0;
  double g_eff = 0.0;
  double op_power = 0.0;
  double eta_pa_std = 0.0;  // standard deviation of the per-trial values
  double eta_r_std = 0.0;
  double eta_product_std = 0.0;  // std of per-trial eta_pa * eta_r
  int trials = 0;
};

using MeasureFn = std::function<EfficiencyMeasurement(const Vec2& k)>;

// Local affine models of both efficiencies around a calibration point,
//   eta_pa ~ C1 (k_tr - beta1 k_im) + C2,
//   eta_r  ~ C3 (k_im - beta2 k_tr) + C4,
// with slopes from central finite differences through the full measurement
// pipeline, plus the peak-cancellation coefficient of the receive-side
// peak model.
struct SurrogateModel {
  Vec2 k0 = Vec2::Zero();
  double eta_pa0 = 0.0;
  double eta_r0 = 0.0;
  double a_pa = 0.0;  // d eta_pa / d k_tr
  double b_pa = 0.0;  // d eta_pa / d k_im
  double a_r = 0.0;   // d eta_r / d k_tr
  double b_r = 0.0;   // d eta_r / d k_im
  double beta_cancel = 0.0;
  double fit_scale = 0.0;  // amplitude scale absorbed by the peak fit
  double c1 = 0.0, beta1 = 0.0, c2 = 0.0;
  double c3 = 0.0, beta2 = 0.0, c4 = 0.0;
  bool degenerate = false;  // a vanishing lead slope; beta ratios forced to 0

  double eta_pa_at(const Vec2& k) const { return c1 * (k(0) - beta1 * k(1)) + c2; }
  double eta_r_at(const Vec2& k) const { return c3 * (k(1) - beta2 * k(0)) + c4; }
};

// Fills the compact coefficients (c1..c4, beta1, beta2) from the raw slopes.
void finalize_surrogate(SurrogateModel& s);

// Five-point stencil: center plus central differences of half-width h along
// each axis.  The peak-cancellation coefficient comes from a least-squares
// fit of the measured EH peaks against the two-parameter model
// scale * (k_im / sqrt(2) - beta * k_tr) * sqrt(n_rx) over the stencil.
SurrogateModel calibrate_surrogate(const Vec2& k0, double h, int n_rx, const MeasureFn& measure);

void save_surrogate(const SurrogateModel& s, const std::string& path);
SurrogateModel load_surrogate(const std::string& path);

struct LinkBudget {
  double tx_power = 1.0;     // W, per transmit array
  double noise_power = 1e-7; // W per subcarrier per receive antenna
  double rho = 0.5;          // power-splitting ratio toward decoding
  double g_eff = 1.0;        // average post-precoding channel power
  double p_min = 0.0;        // W, harvested-power floor
};

struct RateTerms {
  double snr = 0.0;
  int m_order = 0;   // floor(log2(1 + snr))
  double mu = 0.0;   // 1 - 1 / (2 n_streams 2^m_order)
  double rate = 0.0; // bit/s/Hz aggregate
};

// Achievable-rate model at split k under the surrogate PA efficiency.
// Throws std::domain_error when the surrogate drives the SNR nonpositive.
RateTerms rate(const Vec2& k, const LinkBudget& budget, const SurrogateModel& s,
               int n_streams, int k_total);

struct EnergyResult {
  double value = 0.0;
  bool clamped = false;  // a surrogate factor went negative and was floored
};

// Harvested power eta_pa * eta_r * (1 - rho) * P * G_eff under the
// surrogates.
EnergyResult energy(const Vec2& k, const LinkBudget& budget, const SurrogateModel& s);

// Data of the successively convexified allocation problem.
struct ScaProblem {
  Vec2 q0 = Vec2::Zero();  // rate prefactor direction
  Vec2 q1 = Vec2::Zero();  // SNR direction
  Vec2 q2 = Vec2::Zero();  // PA-efficiency direction
  Vec2 q3 = Vec2::Zero();  // rectifier-efficiency direction
  double r0 = 1.0;
  double eta_min = 0.0;    // required efficiency product
  double ns_k = 0.0;       // n_streams * k_total
  double box_hi = 0.0;     // upper bound K/4 on each coordinate
  Mat2 p1 = Mat2::Zero();  // energy-constraint quadratic
  Vec2 qt1 = Vec2::Zero();
  double rt1 = 0.0;
  bool p1_nsd = true;
  double mu = 0.0;
  int n_streams = 0;
  int k_total = 0;
};

ScaProblem build_sca(const LinkBudget& budget, const SurrogateModel& s, int n_streams,
                     int k_total);

// True (pre-convexification) objective (ns_k + q0'k) * log2(r0 + q1'k).
double sca_true_objective(const ScaProblem& p, const Vec2& k);

// Energy-constraint value k' p1 k + qt1' k + rt1; feasible when >= 0.
double sca_constraint(const ScaProblem& p, const Vec2& k);

struct ScaIterate {
  Vec2 k_next = Vec2::Zero();
  double surrogate_objective = 0.0;
  double s_t = 0.0;          // linearization point value r0 + q1'k_t
  Mat2 p0 = Mat2::Zero();    // convexified objective quadratic
  Vec2 qt0 = Vec2::Zero();
  double rt0 = 0.0;
  double kkt_residual = 0.0;
  bool p0_nsd = true;
};

// One outer step: linearize the log at k_t, then maximize the resulting
// quadratic over the box intersected with the energy constraint by
// constraint-filtered coarse-to-fine grid search.  KKT multipliers are
// recovered by least squares as a certificate.
ScaIterate sca_step(const ScaProblem& p, const Vec2& k_t);

struct AllocationResult {
  Vec2 k_relaxed = Vec2::Zero();
  int k_tr = 0;
  int k_im = 0;
  int outer_iters = 0;
  bool converged = false;
  bool rounded_feasible = false;
  double kkt_residual = 0.0;
  bool p0_nsd_all = true;
  std::vector<double> objective_history;  // true objective at each iterate
};

// Outer SCA loop with a backtracking safeguard that keeps the true
// objective nondecreasing, followed by integer rounding over the 3x3
// neighborhood (even k_im only).  Throws infeasible_error when k_init
// violates the constraints.
AllocationResult allocate(const ScaProblem& p, const Vec2& k_init, double eps = 0.5,
                          int max_outer = 50);

// E[PAPR_RX] / E[PAPR_TX] with both expectations over linear ratios.
double xi_metric(const std::vector<double>& papr_tx_linear,
                 const std::vector<double>& papr_rx_linear);

// Receive-PAPR design prediction 20 log10(k_im / sqrt(2) - beta k_tr)
// + 10 log10(n_rx), in dB.  Throws std::domain_error when the peak model
// argument is nonpositive.
double rx_papr_prediction(double k_im, double k_tr, double beta, int n_rx);

}  // namespace swipt
