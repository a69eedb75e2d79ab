// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "swipt/config.hpp"

namespace swipt {

// Worker cap: SWIPT_FORGE_THREADS when set (minimum 1), otherwise the
// hardware concurrency.
int worker_count(int task_count);

// Index-ordered parallel map; results land in pre-indexed slots so the
// reduction order never depends on scheduling.
void parallel_for_indexed(int n, const std::function<void(int)>& fn);

// Everything measured on one frame through the full chain: frame draw,
// tone reservation, EVM-constrained amplification, propagation, splitting,
// rectification.
struct TrialOutcome {
  double papr_tx_linear = 0.0;  // mean over antennas, linear ratio
  double papr_rx_linear = 0.0;  // EH branch, linear ratio
  double eta_pa = 0.0;
  double eta_r = 0.0;
  double v_out = 0.0;
  double p_dc = 0.0;
  double obo_db = 0.0;
  double evm = 0.0;
  double sir_db = 0.0;
  double op_power = 0.0;
  double peak_eh = 0.0;
  double g_eff = 0.0;
};

// One end-to-end frame at the given split.  When eh_out is non-null the
// energy-harvesting branch waveform is copied there.
TrialOutcome run_trial(const ExperimentConfig& cfg, int k_tr, int k_im, std::uint64_t seed,
                       CVec* eh_out = nullptr);

// Monte-Carlo campaign at a fixed split; per-trial seeds derive from
// master_seed, trials run concurrently into indexed slots.
EfficiencyMeasurement measure_efficiencies(const ExperimentConfig& cfg, int k_tr, int k_im,
                                           int trials, std::uint64_t master_seed);

// Adapter for surrogate calibration: rounds the continuous stencil point to
// an integral split (even k_im) and measures it.
MeasureFn pipeline_measure_fn(const ExperimentConfig& cfg, int trials, std::uint64_t master_seed);

LinkBudget budget_from(const ExperimentConfig& cfg, double g_eff);

// CSV drivers behind the CLI subcommands.  Each writes into out_dir (which
// is created when missing), stamps "# config=<hash> seed=<seed>" before the
// header row, and returns the paths written.  Number formatting is fixed,
// so identical config and seed reproduce identical bytes.
std::vector<std::string> run_papr_ccdf(const ExperimentConfig& cfg, const std::string& out_dir);
std::vector<std::string> run_tr_convergence(const ExperimentConfig& cfg, const std::string& out_dir);
std::vector<std::string> run_rectifier_sweep(const ExperimentConfig& cfg, const std::string& out_dir);
std::vector<std::string> run_e2e(const ExperimentConfig& cfg, const std::string& out_dir);
std::vector<std::string> run_re_region(const ExperimentConfig& cfg, const std::string& out_dir);
std::vector<std::string> run_allocate(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace swipt
