// SPDX-License-Identifier: MIT
#include "swipt/channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "swipt/rng.hpp"

namespace swipt {

PowerDelayProfile default_pdp(int n_taps, double decay_db_per_tap) {
  if (n_taps < 1) throw std::invalid_argument("n_taps must be positive");
  PowerDelayProfile pdp(n_taps);
  double total = 0.0;
  for (int l = 0; l < n_taps; ++l) {
    pdp[l].delay_samples = l;
    pdp[l].power = std::pow(10.0, -decay_db_per_tap * l / 10.0);
    total += pdp[l].power;
  }
  for (auto& tap : pdp) tap.power /= total;
  return pdp;
}

PowerDelayProfile load_pdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open PDP file: " + path);
  PowerDelayProfile pdp;
  double total = 0.0;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    int delay;
    double power;
    if (!(row >> delay)) continue;  // blank or comment-only line
    if (!(row >> power)) throw std::runtime_error("malformed PDP line: " + line);
    if (delay < 0 || power <= 0) throw std::runtime_error("PDP entries must have delay >= 0, power > 0");
    pdp.push_back({delay, power});
    total += power;
  }
  if (pdp.empty()) throw std::runtime_error("PDP file has no taps: " + path);
  for (auto& tap : pdp) tap.power /= total;
  return pdp;
}

ChannelRealization generate_channel(const ChannelConfig& cfg, int n_rx, int n_tx,
                                    int k_total, std::uint64_t seed) {
  if (n_rx < 1 || n_tx < 1 || k_total < 1) throw std::invalid_argument("invalid channel dimensions");
  if (cfg.pdp.empty()) throw std::invalid_argument("empty power delay profile");

  const double loss = std::pow(10.0, -cfg.path_loss_db / 10.0);
  Rng rng(seed);
  ChannelRealization chan;
  chan.taps.reserve(cfg.pdp.size());
  chan.delays.reserve(cfg.pdp.size());
  for (const auto& tap : cfg.pdp) {
    const double scale = std::sqrt(tap.power * loss);
    CMat g(n_rx, n_tx);
    for (Eigen::Index r = 0; r < n_rx; ++r)
      for (Eigen::Index c = 0; c < n_tx; ++c) g(r, c) = scale * rng.cgaussian();
    chan.taps.push_back(std::move(g));
    chan.delays.push_back(tap.delay_samples);
  }

  chan.freq.resize(k_total);
  for (int k = 0; k < k_total; ++k) {
    CMat h = CMat::Zero(n_rx, n_tx);
    for (std::size_t l = 0; l < chan.taps.size(); ++l) {
      const double angle = -2.0 * std::numbers::pi * k * chan.delays[l] / static_cast<double>(k_total);
      h += chan.taps[l] * std::polar(1.0, angle);
    }
    chan.freq[static_cast<std::size_t>(k)] = std::move(h);
  }
  return chan;
}

CMat rzf_precoder(const CMat& h, double delta, int n_streams) {
  if (n_streams < 1 || n_streams > h.rows() || n_streams > h.cols())
    throw std::invalid_argument("n_streams must lie in [1, min(n_rx, n_tx)]");
  if (delta < 0) throw std::invalid_argument("delta must be nonnegative");
  const Eigen::Index n_rx = h.rows();
  CMat gram = h * h.adjoint() + delta * CMat::Identity(n_rx, n_rx);
  CMat w = (h.adjoint() * gram.inverse()).leftCols(n_streams);
  const double norm = w.norm();
  if (!(norm > 0)) throw std::invalid_argument("degenerate channel: precoder vanished");
  return w / norm;
}

std::vector<CMat> precoders_for(const ChannelRealization& chan, double delta, int n_streams) {
  std::vector<CMat> out;
  out.reserve(chan.freq.size());
  for (const auto& h : chan.freq) out.push_back(rzf_precoder(h, delta, n_streams));
  return out;
}

double effective_gain(const ChannelRealization& chan, const std::vector<CMat>& precoders) {
  if (chan.freq.empty() || chan.freq.size() != precoders.size())
    throw std::invalid_argument("need one precoder per subcarrier");
  double acc = 0.0;
  for (std::size_t k = 0; k < chan.freq.size(); ++k)
    acc += (chan.freq[k] * precoders[k]).squaredNorm();
  const double n_streams = static_cast<double>(precoders.front().cols());
  return acc / (static_cast<double>(chan.freq.size()) * n_streams);
}

ReceivedFrame propagate(const CMat& antenna_grid, const ChannelRealization& chan,
                        double noise_power, int oversampling, std::uint64_t seed) {
  const Eigen::Index k_total = antenna_grid.cols();
  if (static_cast<std::size_t>(k_total) != chan.freq.size())
    throw std::invalid_argument("grid width must match the channel realization");
  if (chan.freq.empty() || chan.freq.front().cols() != antenna_grid.rows())
    throw std::invalid_argument("grid height must match n_tx");
  if (noise_power < 0) throw std::invalid_argument("noise power must be nonnegative");

  const Eigen::Index n_rx = chan.freq.front().rows();
  Rng rng(seed);
  ReceivedFrame rx;
  rx.grid.resize(n_rx, k_total);
  const double sigma = std::sqrt(noise_power);
  for (Eigen::Index k = 0; k < k_total; ++k) {
    rx.grid.col(k) = chan.freq[static_cast<std::size_t>(k)] * antenna_grid.col(k);
    for (Eigen::Index r = 0; r < n_rx; ++r) rx.grid(r, k) += sigma * rng.cgaussian();
  }
  rx.time.reserve(static_cast<std::size_t>(n_rx));
  for (Eigen::Index r = 0; r < n_rx; ++r)
    rx.time.push_back(ofdm_modulate(rx.grid.row(r).transpose(), oversampling));
  return rx;
}

SplitOutputs power_split(const std::vector<CVec>& received, double rho) {
  if (received.empty()) throw std::invalid_argument("no receive branches");
  if (rho < 0 || rho > 1) throw std::invalid_argument("rho must lie in [0, 1]");
  SplitOutputs out;
  out.eh = CVec::Zero(received.front().size());
  const double id_scale = std::sqrt(rho);
  for (const auto& y : received) {
    if (y.size() != out.eh.size()) throw std::invalid_argument("branch length mismatch");
    out.id.push_back(id_scale * y);
    out.eh += y;
  }
  out.eh *= std::sqrt(1.0 - rho);
  return out;
}

}  // namespace swipt
