// SPDX-License-Identifier: MIT
#include "swipt/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace swipt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log2_of(double x) { return std::log2(x); }

}  // namespace

void finalize_surrogate(SurrogateModel& s) {
  s.degenerate = (s.a_pa == 0.0) || (s.b_r == 0.0);
  s.c1 = s.a_pa;
  s.beta1 = (s.a_pa == 0.0) ? 0.0 : -s.b_pa / s.a_pa;
  s.c2 = s.eta_pa0 - s.a_pa * s.k0(0) - s.b_pa * s.k0(1);
  s.c3 = s.b_r;
  s.beta2 = (s.b_r == 0.0) ? 0.0 : -s.a_r / s.b_r;
  s.c4 = s.eta_r0 - s.a_r * s.k0(0) - s.b_r * s.k0(1);
}

SurrogateModel calibrate_surrogate(const Vec2& k0, double h, int n_rx, const MeasureFn& measure) {
  if (!(h > 0)) throw std::invalid_argument("stencil half-width must be positive");
  if (k0(0) - h < 0 || k0(1) - h < 0)
    throw std::invalid_argument("stencil leaves the nonnegative quadrant");
  if (n_rx < 1) throw std::invalid_argument("n_rx must be positive");

  const Vec2 e1(1, 0), e2(0, 1);
  EfficiencyMeasurement center = measure(k0);
  EfficiencyMeasurement tr_hi = measure(k0 + h * e1);
  EfficiencyMeasurement tr_lo = measure(k0 - h * e1);
  EfficiencyMeasurement im_hi = measure(k0 + h * e2);
  EfficiencyMeasurement im_lo = measure(k0 - h * e2);

  SurrogateModel s;
  s.k0 = k0;
  s.eta_pa0 = center.eta_pa;
  s.eta_r0 = center.eta_r;
  s.a_pa = (tr_hi.eta_pa - tr_lo.eta_pa) / (2.0 * h);
  s.b_pa = (im_hi.eta_pa - im_lo.eta_pa) / (2.0 * h);
  s.a_r = (tr_hi.eta_r - tr_lo.eta_r) / (2.0 * h);
  s.b_r = (im_hi.eta_r - im_lo.eta_r) / (2.0 * h);

  // Two-parameter fit peak ~ scale * (k_im/sqrt(2) - beta k_tr) * sqrt(n_rx)
  // over the stencil; the scale soaks up the link's amplitude normalization
  // so beta is a pure cancellation coefficient.
  const double root_nr = std::sqrt(static_cast<double>(n_rx));
  Eigen::Matrix<double, 5, 2> design;
  Eigen::Matrix<double, 5, 1> peaks;
  const EfficiencyMeasurement* ms[5] = {&center, &tr_hi, &tr_lo, &im_hi, &im_lo};
  const Vec2 ks[5] = {k0, k0 + h * e1, k0 - h * e1, k0 + h * e2, k0 - h * e2};
  for (int i = 0; i < 5; ++i) {
    design(i, 0) = ks[i](1) / std::numbers::sqrt2 * root_nr;
    design(i, 1) = -ks[i](0) * root_nr;
    peaks(i) = ms[i]->peak_eh;
  }
  Eigen::Vector2d theta = design.colPivHouseholderQr().solve(peaks);
  if (std::abs(theta(0)) > 0) {
    s.fit_scale = theta(0);
    s.beta_cancel = theta(1) / theta(0);
  }

  finalize_surrogate(s);
  return s;
}

void save_surrogate(const SurrogateModel& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write surrogate file: " + path);
  auto put = [&](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << key << ' ' << buf << '\n';
  };
  put("k0_tr", s.k0(0));
  put("k0_im", s.k0(1));
  put("eta_pa0", s.eta_pa0);
  put("eta_r0", s.eta_r0);
  put("a_pa", s.a_pa);
  put("b_pa", s.b_pa);
  put("a_r", s.a_r);
  put("b_r", s.b_r);
  put("beta_cancel", s.beta_cancel);
  put("fit_scale", s.fit_scale);
  out << "degenerate " << (s.degenerate ? 1 : 0) << '\n';
  if (!out) throw std::runtime_error("failed writing surrogate file: " + path);
}

SurrogateModel load_surrogate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open surrogate file: " + path);
  std::map<std::string, double> kv;
  std::string key;
  double value;
  while (in >> key >> value) kv[key] = value;
  const char* required[] = {"k0_tr", "k0_im", "eta_pa0", "eta_r0", "a_pa",
                            "b_pa",  "a_r",   "b_r",     "beta_cancel"};
  for (const char* r : required)
    if (!kv.count(r)) throw std::runtime_error(std::string("surrogate file misses key: ") + r);

  SurrogateModel s;
  s.k0 = Vec2(kv["k0_tr"], kv["k0_im"]);
  s.eta_pa0 = kv["eta_pa0"];
  s.eta_r0 = kv["eta_r0"];
  s.a_pa = kv["a_pa"];
  s.b_pa = kv["b_pa"];
  s.a_r = kv["a_r"];
  s.b_r = kv["b_r"];
  s.beta_cancel = kv["beta_cancel"];
  s.fit_scale = kv.count("fit_scale") ? kv["fit_scale"] : 0.0;
  finalize_surrogate(s);
  return s;
}

RateTerms rate(const Vec2& k, const LinkBudget& budget, const SurrogateModel& s,
               int n_streams, int k_total) {
  if (n_streams < 1 || k_total < 1) throw std::invalid_argument("invalid dimensions");
  RateTerms t;
  const double eta = s.eta_pa_at(k);
  t.snr = budget.rho * eta * budget.tx_power * budget.g_eff / budget.noise_power;
  if (!(t.snr > 0)) throw std::domain_error("surrogate PA efficiency drives the SNR nonpositive");
  const double spectral = log2_of(1.0 + t.snr);
  t.m_order = std::max(0, static_cast<int>(std::floor(spectral)));
  t.mu = 1.0 - 1.0 / (2.0 * n_streams * std::pow(2.0, t.m_order));
  t.rate = n_streams * (k_total - t.mu * k(1) - k(0)) * spectral;
  return t;
}

EnergyResult energy(const Vec2& k, const LinkBudget& budget, const SurrogateModel& s) {
  EnergyResult e;
  double pa = s.eta_pa_at(k);
  double r = s.eta_r_at(k);
  if (pa < 0 || r < 0 || pa > 1 || r > 1) {
    e.clamped = true;
    pa = std::clamp(pa, 0.0, 1.0);
    r = std::clamp(r, 0.0, 1.0);
  }
  e.value = pa * r * (1.0 - budget.rho) * budget.tx_power * budget.g_eff;
  return e;
}

namespace {

bool nsd_2x2(const Mat2& m) {
  // Symmetric 2x2 is NSD iff trace <= 0 and det >= 0, up to rounding slack.
  const double scale = m.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * std::max(1.0, scale);
  return m.trace() <= tol && m.determinant() >= -tol * std::max(1.0, scale);
}

}  // namespace

ScaProblem build_sca(const LinkBudget& budget, const SurrogateModel& s, int n_streams,
                     int k_total) {
  if (n_streams < 1 || k_total < 4) throw std::invalid_argument("invalid dimensions");
  if (!(budget.rho >= 0 && budget.rho < 1))
    throw std::invalid_argument("rho must lie in [0, 1) for a harvesting link");
  if (!(budget.tx_power > 0) || !(budget.noise_power > 0) || !(budget.g_eff > 0))
    throw std::invalid_argument("budget powers must be positive");

  ScaProblem p;
  p.n_streams = n_streams;
  p.k_total = k_total;
  p.ns_k = static_cast<double>(n_streams) * k_total;
  p.box_hi = k_total / 4.0;

  const double pg = budget.tx_power * budget.g_eff / budget.noise_power;
  const double snr0 = budget.rho * s.eta_pa0 * pg;
  if (!(snr0 > 0)) throw std::domain_error("calibration point has nonpositive SNR");
  const int m_order = std::max(0, static_cast<int>(std::floor(log2_of(1.0 + snr0))));
  p.mu = 1.0 - 1.0 / (2.0 * n_streams * std::pow(2.0, m_order));

  p.q0 = Vec2(-static_cast<double>(n_streams), -p.mu * n_streams);
  p.q1 = budget.rho * s.c1 * pg * Vec2(1.0, -s.beta1);
  p.q2 = s.c1 * Vec2(1.0, -s.beta1);
  p.q3 = s.c3 * Vec2(-s.beta2, 1.0);
  p.r0 = 1.0 + budget.rho * s.c2 * pg;
  p.eta_min = budget.p_min / ((1.0 - budget.rho) * budget.tx_power * budget.g_eff);

  p.p1 = 0.5 * (p.q2 * p.q3.transpose() + p.q3 * p.q2.transpose());
  p.qt1 = s.c2 * p.q3 + s.c4 * p.q2;
  p.rt1 = s.c2 * s.c4 - p.eta_min;
  p.p1_nsd = nsd_2x2(p.p1);
  return p;
}

double sca_true_objective(const ScaProblem& p, const Vec2& k) {
  const double arg = p.r0 + p.q1.dot(k);
  if (!(arg > 0)) return -kInf;
  return (p.ns_k + p.q0.dot(k)) * log2_of(arg);
}

double sca_constraint(const ScaProblem& p, const Vec2& k) {
  return k.dot(p.p1 * k) + p.qt1.dot(k) + p.rt1;
}

namespace {

bool in_box(const ScaProblem& p, const Vec2& k) {
  return k(0) >= 0 && k(1) >= 0 && k(0) <= p.box_hi && k(1) <= p.box_hi;
}

bool sca_feasible(const ScaProblem& p, const Vec2& k) {
  return in_box(p, k) && sca_constraint(p, k) >= 0;
}

struct QuadObjective {
  Mat2 a;
  Vec2 b;
  double c;
  double operator()(const Vec2& k) const { return k.dot(a * k) + b.dot(k) + c; }
};

// Constraint-filtered search: one dense coarse pass over the box, then
// shrinking 41x41 windows around the incumbent.  Ten rounds take the cell
// below 1e-9 * box, enough for the KKT certificate downstream.
Vec2 grid_solve(const ScaProblem& p, const QuadObjective& f, const Vec2& seed) {
  Vec2 best = seed;
  double best_val = sca_feasible(p, seed) ? f(seed) : -kInf;

  const int coarse = 200;
  const double h0 = p.box_hi / coarse;
  for (int i = 0; i <= coarse; ++i) {
    for (int j = 0; j <= coarse; ++j) {
      Vec2 k(i * h0, j * h0);
      if (sca_constraint(p, k) < 0) continue;
      const double v = f(k);
      if (v > best_val) {
        best_val = v;
        best = k;
      }
    }
  }
  if (best_val == -kInf) throw infeasible_error("energy constraint excludes the whole box");

  double h = h0;
  const int fine = 40;
  for (int round = 0; round < 10; ++round) {
    const Vec2 lo = (best.array() - 2.0 * h).cwiseMax(0.0);
    const Vec2 hi = (best.array() + 2.0 * h).cwiseMin(p.box_hi);
    const Vec2 cell = (hi - lo) / fine;
    for (int i = 0; i <= fine; ++i) {
      for (int j = 0; j <= fine; ++j) {
        Vec2 k(lo(0) + i * cell(0), lo(1) + j * cell(1));
        if (sca_constraint(p, k) < 0) continue;
        const double v = f(k);
        if (v > best_val) {
          best_val = v;
          best = k;
        }
      }
    }
    h = std::max(cell.maxCoeff(), 1e-15 * p.box_hi);
  }
  return best;
}

// Multiplier recovery for the maximization KKT system
//   grad_f + lambda grad_g + sum mu_i e_i - sum nu_i e_i = 0,
// all multipliers nonnegative; columns with negative estimates are dropped
// and the system re-solved.
double kkt_residual(const ScaProblem& p, const QuadObjective& f, const Vec2& k) {
  const Vec2 grad_f = 2.0 * f.a * k + f.b;
  const Vec2 grad_g = 2.0 * p.p1 * k + p.qt1;

  const double atol = 1e-7 * std::max(1.0, p.box_hi);
  std::vector<Vec2> cols;
  if (std::abs(sca_constraint(p, k)) <= atol * (grad_g.norm() + 1.0)) cols.push_back(grad_g);
  for (int i = 0; i < 2; ++i) {
    if (k(i) <= atol) cols.push_back(Vec2::Unit(i));
    if (p.box_hi - k(i) <= atol) cols.push_back(-Vec2::Unit(i));
  }

  std::vector<bool> keep(cols.size(), true);
  for (;;) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (keep[i]) idx.push_back(static_cast<int>(i));
    if (idx.empty()) return grad_f.norm();

    Eigen::MatrixXd a(2, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = cols[static_cast<std::size_t>(idx[i])];
    Eigen::VectorXd theta = a.colPivHouseholderQr().solve(-grad_f);

    int worst = -1;
    double most_negative = -1e-12;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      if (theta(i) < most_negative) {
        most_negative = theta(i);
        worst = idx[static_cast<std::size_t>(i)];
      }
    }
    if (worst < 0) return (grad_f + a * theta).norm();
    keep[static_cast<std::size_t>(worst)] = false;
  }
}

}  // namespace

ScaIterate sca_step(const ScaProblem& p, const Vec2& k_t) {
  ScaIterate it;
  it.s_t = p.r0 + p.q1.dot(k_t);
  if (!(it.s_t > 0)) throw std::domain_error("linearization point outside the log domain");

  const double ln2 = std::numbers::ln2;
  it.p0 = (p.q0 * p.q1.transpose() + p.q1 * p.q0.transpose()) / (2.0 * it.s_t * ln2);
  it.qt0 = log2_of(it.s_t) * p.q0 + (p.ns_k / (it.s_t * ln2)) * p.q1 -
           (p.q1.dot(k_t) / (it.s_t * ln2)) * p.q0;
  it.rt0 = p.ns_k * log2_of(it.s_t) - (p.ns_k / (it.s_t * ln2)) * p.q1.dot(k_t);
  it.p0_nsd = nsd_2x2(it.p0);

  const QuadObjective f{it.p0, it.qt0, it.rt0};
  it.k_next = grid_solve(p, f, k_t);
  it.surrogate_objective = f(it.k_next);
  it.kkt_residual = kkt_residual(p, f, it.k_next);
  return it;
}

AllocationResult allocate(const ScaProblem& p, const Vec2& k_init, double eps, int max_outer) {
  if (!(eps > 0) || max_outer < 1) throw std::invalid_argument("invalid SCA loop parameters");
  if (!sca_feasible(p, k_init) || !(p.r0 + p.q1.dot(k_init) > 0))
    throw infeasible_error("initial split violates the constraints");

  AllocationResult res;
  Vec2 k = k_init;
  res.objective_history.push_back(sca_true_objective(p, k));

  for (int t = 0; t < max_outer; ++t) {
    ScaIterate it = sca_step(p, k);
    res.p0_nsd_all = res.p0_nsd_all && it.p0_nsd;
    res.kkt_residual = it.kkt_residual;
    res.outer_iters = t + 1;

    // The convexified objective is tangent from above, so a raw step can
    // overshoot; backtracking along the step direction restores ascent of
    // the true objective.
    Vec2 d = it.k_next - k;
    double theta = 1.0;
    const double f_cur = sca_true_objective(p, k);
    Vec2 k_next = k;
    while (theta > 1e-10) {
      Vec2 cand = k + theta * d;
      if (sca_feasible(p, cand) && sca_true_objective(p, cand) >= f_cur) {
        k_next = cand;
        break;
      }
      theta *= 0.5;
    }

    const double move = (k_next - k).norm();
    k = k_next;
    res.objective_history.push_back(sca_true_objective(p, k));
    if (move <= eps) {
      res.converged = true;
      break;
    }
  }
  res.k_relaxed = k;

  // Integer rounding: 3x3 neighborhood around the nearest (integer, even)
  // pair, scored by the true objective over feasible candidates only.
  const int hi = static_cast<int>(std::floor(p.box_hi));
  const int base_tr = std::clamp(static_cast<int>(std::lround(k(0))), 0, hi);
  int base_im = static_cast<int>(std::lround(k(1) / 2.0)) * 2;
  base_im = std::clamp(base_im, 0, hi - (hi % 2));

  double best_val = -kInf;
  for (int dt = -1; dt <= 1; ++dt) {
    for (int di = -2; di <= 2; di += 2) {
      const int kt = base_tr + dt;
      const int ki = base_im + di;
      if (kt < 0 || ki < 0 || kt > hi || ki > hi) continue;
      Vec2 cand(kt, ki);
      if (!sca_feasible(p, cand)) continue;
      const double v = sca_true_objective(p, cand);
      if (v > best_val) {
        best_val = v;
        res.k_tr = kt;
        res.k_im = ki;
        res.rounded_feasible = true;
      }
    }
  }
  if (!res.rounded_feasible) {
    res.k_tr = base_tr;
    res.k_im = base_im;
  }
  return res;
}

double xi_metric(const std::vector<double>& papr_tx_linear,
                 const std::vector<double>& papr_rx_linear) {
  if (papr_tx_linear.empty() || papr_rx_linear.empty())
    throw std::invalid_argument("xi needs samples on both sides");
  auto mean = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
  };
  const double tx = mean(papr_tx_linear);
  if (!(tx > 0)) throw std::invalid_argument("transmit PAPR mean must be positive");
  return mean(papr_rx_linear) / tx;
}

double rx_papr_prediction(double k_im, double k_tr, double beta, int n_rx) {
  if (n_rx < 1) throw std::domain_error("n_rx must be positive");
  const double arg = k_im / std::numbers::sqrt2 - beta * k_tr;
  if (!(arg > 0)) throw std::domain_error("peak model argument must be positive");
  return 20.0 * std::log10(arg) + 10.0 * std::log10(static_cast<double>(n_rx));
}

}  // namespace swipt
