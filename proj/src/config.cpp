// SPDX-License-Identifier: MIT
#include "swipt/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace swipt {

namespace {

using nlohmann::json;

// Reject typos instead of silently running defaults.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* key : allowed)
      if (item.key() == key) ok = true;
    if (!ok) throw std::runtime_error(std::string("unknown config key '") + item.key() + "' in " + where);
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  check_keys(j, {"mimo", "partition", "im", "diode", "pa", "channel", "budget", "tr", "sca",
                 "master_seed", "trials", "ccdf_symbols", "output_dir"},
             "top level");

  if (j.contains("mimo")) {
    const auto& m = j["mimo"];
    check_keys(m, {"n_tx", "n_rx", "n_streams", "n_subcarriers", "oversampling",
                   "subcarrier_spacing_hz", "qam_bits"},
               "mimo");
    get_if(m, "n_tx", cfg.mimo.n_tx);
    get_if(m, "n_rx", cfg.mimo.n_rx);
    get_if(m, "n_streams", cfg.mimo.n_streams);
    get_if(m, "n_subcarriers", cfg.mimo.n_subcarriers);
    get_if(m, "oversampling", cfg.mimo.oversampling);
    get_if(m, "subcarrier_spacing_hz", cfg.mimo.subcarrier_spacing_hz);
    get_if(m, "qam_bits", cfg.mimo.qam_bits);
  }
  if (j.contains("partition")) {
    const auto& p = j["partition"];
    check_keys(p, {"k_tr", "k_im"}, "partition");
    get_if(p, "k_tr", cfg.k_tr);
    get_if(p, "k_im", cfg.k_im);
  }
  if (j.contains("im")) {
    const auto& im = j["im"];
    check_keys(im, {"phase"}, "im");
    get_if(im, "phase", cfg.im_phase);
  }
  if (j.contains("diode")) {
    const auto& d = j["diode"];
    check_keys(d, {"i_sat", "i_bv", "v_breakdown", "ideality", "v_thermal", "r_load", "r_source"},
               "diode");
    get_if(d, "i_sat", cfg.diode.i_sat);
    get_if(d, "i_bv", cfg.diode.i_bv);
    get_if(d, "v_breakdown", cfg.diode.v_breakdown);
    get_if(d, "ideality", cfg.diode.ideality);
    get_if(d, "v_thermal", cfg.diode.v_thermal);
    get_if(d, "r_load", cfg.diode.r_load);
    get_if(d, "r_source", cfg.diode.r_source);
  }
  if (j.contains("pa")) {
    const auto& p = j["pa"];
    check_keys(p, {"p_sat", "gain", "smoothness", "eta_max", "evm_max", "drive_min_dbm",
                   "drive_max_dbm"},
               "pa");
    get_if(p, "p_sat", cfg.pa.p_sat);
    get_if(p, "gain", cfg.pa.gain);
    get_if(p, "smoothness", cfg.pa.smoothness);
    get_if(p, "eta_max", cfg.pa.eta_max);
    get_if(p, "evm_max", cfg.evm_max);
    get_if(p, "drive_min_dbm", cfg.drive_min_dbm);
    get_if(p, "drive_max_dbm", cfg.drive_max_dbm);
  }
  if (j.contains("channel")) {
    const auto& c = j["channel"];
    check_keys(c, {"path_loss_db", "pdp_file", "n_taps", "tap_decay_db", "noise_power",
                   "rzf_delta"},
               "channel");
    get_if(c, "path_loss_db", cfg.channel.path_loss_db);
    get_if(c, "pdp_file", cfg.pdp_file);
    get_if(c, "n_taps", cfg.n_taps);
    get_if(c, "tap_decay_db", cfg.tap_decay_db);
    get_if(c, "noise_power", cfg.noise_power);
    get_if(c, "rzf_delta", cfg.rzf_delta);
  }
  if (j.contains("budget")) {
    const auto& b = j["budget"];
    check_keys(b, {"tx_power", "p_min", "rho"}, "budget");
    get_if(b, "tx_power", cfg.tx_power);
    get_if(b, "p_min", cfg.p_min);
    get_if(b, "rho", cfg.rho);
  }
  if (j.contains("tr")) {
    const auto& t = j["tr"];
    check_keys(t, {"sharpness_scale", "step", "max_iters", "grad_tol", "oversampling"}, "tr");
    get_if(t, "sharpness_scale", cfg.tr.sharpness_scale);
    get_if(t, "step", cfg.tr.step);
    get_if(t, "max_iters", cfg.tr.max_iters);
    get_if(t, "grad_tol", cfg.tr.grad_tol);
    get_if(t, "oversampling", cfg.tr.oversampling);
  }
  if (j.contains("sca")) {
    const auto& s = j["sca"];
    check_keys(s, {"epsilon", "max_outer", "calib_step", "calib_trials", "recalibrate"}, "sca");
    get_if(s, "epsilon", cfg.sca_epsilon);
    get_if(s, "max_outer", cfg.sca_max_outer);
    get_if(s, "calib_step", cfg.calib_step);
    get_if(s, "calib_trials", cfg.calib_trials);
    get_if(s, "recalibrate", cfg.recalibrate);
  }
  get_if(j, "master_seed", cfg.master_seed);
  get_if(j, "trials", cfg.trials);
  get_if(j, "ccdf_symbols", cfg.ccdf_symbols);
  get_if(j, "output_dir", cfg.output_dir);

  if (cfg.n_taps < 1) throw std::runtime_error("n_taps must be positive");
  cfg.channel.pdp =
      cfg.pdp_file.empty() ? default_pdp(cfg.n_taps, cfg.tap_decay_db) : load_pdp(cfg.pdp_file);
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  json j;
  j["mimo"] = {{"n_tx", cfg.mimo.n_tx},
               {"n_rx", cfg.mimo.n_rx},
               {"n_streams", cfg.mimo.n_streams},
               {"n_subcarriers", cfg.mimo.n_subcarriers},
               {"oversampling", cfg.mimo.oversampling},
               {"subcarrier_spacing_hz", cfg.mimo.subcarrier_spacing_hz},
               {"qam_bits", cfg.mimo.qam_bits}};
  j["partition"] = {{"k_tr", cfg.k_tr}, {"k_im", cfg.k_im}};
  j["im"] = {{"phase", cfg.im_phase}};
  j["diode"] = {{"i_sat", cfg.diode.i_sat},
                {"i_bv", cfg.diode.i_bv},
                {"v_breakdown", cfg.diode.v_breakdown},
                {"ideality", cfg.diode.ideality},
                {"v_thermal", cfg.diode.v_thermal},
                {"r_load", cfg.diode.r_load},
                {"r_source", cfg.diode.r_source}};
  j["pa"] = {{"p_sat", cfg.pa.p_sat},
             {"gain", cfg.pa.gain},
             {"smoothness", cfg.pa.smoothness},
             {"eta_max", cfg.pa.eta_max},
             {"evm_max", cfg.evm_max},
             {"drive_min_dbm", cfg.drive_min_dbm},
             {"drive_max_dbm", cfg.drive_max_dbm}};
  j["channel"] = {{"path_loss_db", cfg.channel.path_loss_db},
                  {"pdp_file", cfg.pdp_file},
                  {"n_taps", cfg.n_taps},
                  {"tap_decay_db", cfg.tap_decay_db},
                  {"noise_power", cfg.noise_power},
                  {"rzf_delta", cfg.rzf_delta}};
  j["budget"] = {{"tx_power", cfg.tx_power}, {"p_min", cfg.p_min}, {"rho", cfg.rho}};
  j["tr"] = {{"sharpness_scale", cfg.tr.sharpness_scale},
             {"step", cfg.tr.step},
             {"max_iters", cfg.tr.max_iters},
             {"grad_tol", cfg.tr.grad_tol},
             {"oversampling", cfg.tr.oversampling}};
  j["sca"] = {{"epsilon", cfg.sca_epsilon},
              {"max_outer", cfg.sca_max_outer},
              {"calib_step", cfg.calib_step},
              {"calib_trials", cfg.calib_trials},
              {"recalibrate", cfg.recalibrate}};
  j["master_seed"] = cfg.master_seed;
  j["trials"] = cfg.trials;
  j["ccdf_symbols"] = cfg.ccdf_symbols;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

void apply_quick(ExperimentConfig& cfg) {
  cfg.mimo.n_subcarriers = 256;
  cfg.mimo.oversampling = 2;
  cfg.k_tr = std::min(cfg.k_tr, 32);
  cfg.k_im = std::min(cfg.k_im, 32);
  cfg.trials = std::min(cfg.trials, 20);
  cfg.ccdf_symbols = std::min(cfg.ccdf_symbols, 100);
  cfg.calib_trials = std::min(cfg.calib_trials, 5);
  cfg.calib_step = std::min(cfg.calib_step, 8.0);
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.mimo);
  validate(cfg.diode);
  build_partition(cfg.mimo.n_subcarriers, cfg.k_tr, cfg.k_im);  // throws on a bad split
  if (cfg.evm_max <= 0 || cfg.evm_max >= 1) throw std::runtime_error("evm_max must lie in (0, 1)");
  if (cfg.drive_min_dbm >= cfg.drive_max_dbm)
    throw std::runtime_error("drive region must satisfy min < max");
  if (cfg.noise_power <= 0) throw std::runtime_error("noise_power must be positive");
  if (cfg.tx_power <= 0) throw std::runtime_error("tx_power must be positive");
  if (cfg.p_min < 0) throw std::runtime_error("p_min must be nonnegative");
  if (cfg.rho < 0 || cfg.rho >= 1) throw std::runtime_error("rho must lie in [0, 1)");
  if (cfg.trials < 1 || cfg.ccdf_symbols < 1) throw std::runtime_error("trial counts must be positive");
  if (cfg.calib_step <= 0 || cfg.calib_trials < 1) throw std::runtime_error("invalid calibration settings");
  if (cfg.sca_epsilon <= 0 || cfg.sca_max_outer < 1) throw std::runtime_error("invalid SCA settings");
  if (cfg.tr.max_iters < 1 || cfg.tr.step <= 0 || cfg.tr.sharpness_scale <= 0 ||
      cfg.tr.oversampling < 1)
    throw std::runtime_error("invalid tone-reservation settings");
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = dump_config(cfg);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace swipt
