// SPDX-License-Identifier: MIT
#include "swipt/waveform.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace swipt {

void validate(const MimoConfig& m) {
  if (m.n_tx < 1 || m.n_rx < 1) throw std::invalid_argument("antenna counts must be positive");
  if (m.n_streams < 1 || m.n_streams > std::min(m.n_tx, m.n_rx))
    throw std::invalid_argument("n_streams must lie in [1, min(n_tx, n_rx)]");
  if (m.n_subcarriers < 2 || (m.n_subcarriers & 1))
    throw std::invalid_argument("n_subcarriers must be even and >= 2");
  if (m.oversampling < 1) throw std::invalid_argument("oversampling must be >= 1");
  if (m.subcarrier_spacing_hz <= 0) throw std::invalid_argument("subcarrier spacing must be positive");
  if (m.qam_bits < 2 || (m.qam_bits & 1)) throw std::invalid_argument("qam_bits must be even and >= 2");
}

SubcarrierPartition build_partition(int k_total, int k_tr, int k_im) {
  if (k_total < 1) throw std::invalid_argument("k_total must be positive");
  if (k_tr < 0 || k_im < 0) throw std::invalid_argument("block sizes must be nonnegative");
  if (k_im & 1) throw std::invalid_argument("k_im must be even");
  if (k_tr + k_im > k_total) throw std::invalid_argument("k_tr + k_im exceeds k_total");

  SubcarrierPartition p;
  p.k_total = k_total;
  p.set_tr.resize(k_tr);
  std::iota(p.set_tr.begin(), p.set_tr.end(), 0);
  p.set_im.resize(k_im);
  std::iota(p.set_im.begin(), p.set_im.end(), k_tr);
  p.set_qam.resize(k_total - k_tr - k_im);
  std::iota(p.set_qam.begin(), p.set_qam.end(), k_tr + k_im);
  return p;
}

ImConfig make_im_config(int n_rx, double phase) {
  if (n_rx < 1) throw std::invalid_argument("n_rx must be positive");
  ImConfig im;
  im.amplitude = std::sqrt(2.0 / static_cast<double>(n_rx));
  im.phase = phase;
  return im;
}

namespace {

// Gray decode: recover the rank of a Gray codeword.
unsigned gray_to_rank(unsigned g) {
  unsigned n = g;
  for (unsigned shift = 1; shift < 8 * sizeof(unsigned); shift <<= 1) n ^= n >> shift;
  return n;
}

// Amplitude level for `axis_bits` Gray bits, MSB first: level ranks are
// Gray-ordered so neighbouring levels differ in exactly one bit.
double gray_level(const std::vector<int>& bits, std::size_t offset, int axis_bits) {
  unsigned g = 0;
  for (int j = 0; j < axis_bits; ++j) g = (g << 1) | static_cast<unsigned>(bits[offset + j]);
  unsigned rank = gray_to_rank(g);
  return 2.0 * static_cast<double>(rank) - (static_cast<double>(1u << axis_bits) - 1.0);
}

}  // namespace

CVec map_qam(const std::vector<int>& bits, int bits_per_symbol) {
  if (bits_per_symbol < 2 || (bits_per_symbol & 1))
    throw std::invalid_argument("bits_per_symbol must be even and >= 2");
  if (bits.size() % static_cast<std::size_t>(bits_per_symbol))
    throw std::invalid_argument("bit count must be a multiple of bits_per_symbol");
  for (int b : bits)
    if (b != 0 && b != 1) throw std::invalid_argument("bits must be 0/1");

  const int axis_bits = bits_per_symbol / 2;
  const double cardinality = std::pow(2.0, bits_per_symbol);
  const double norm = std::sqrt(2.0 * (cardinality - 1.0) / 3.0);

  const std::size_t n_sym = bits.size() / static_cast<std::size_t>(bits_per_symbol);
  CVec out(static_cast<Eigen::Index>(n_sym));
  for (std::size_t s = 0; s < n_sym; ++s) {
    const std::size_t base = s * static_cast<std::size_t>(bits_per_symbol);
    double i_level = gray_level(bits, base, axis_bits);
    double q_level = gray_level(bits, base + static_cast<std::size_t>(axis_bits), axis_bits);
    out(static_cast<Eigen::Index>(s)) = Complex(i_level, q_level) / norm;
  }
  return out;
}

CVec map_im(const std::vector<int>& bits, const ImConfig& im) {
  for (int b : bits)
    if (b != 0 && b != 1) throw std::invalid_argument("bits must be 0/1");
  const Complex s = im.symbol();
  CVec out = CVec::Zero(2 * static_cast<Eigen::Index>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i)
    out(2 * static_cast<Eigen::Index>(i) + bits[i]) = s;
  return out;
}

namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace

CVec ofdm_modulate(const CVec& spectrum, int oversampling) {
  const Eigen::Index k = spectrum.size();
  if (k < 1) throw std::invalid_argument("empty spectrum");
  if (oversampling < 1) throw std::invalid_argument("oversampling must be >= 1");
  if (oversampling > 1 && (k & 1)) throw std::invalid_argument("oversampling requires even k_total");

  const Eigen::Index n = static_cast<Eigen::Index>(oversampling) * k;
  CVec padded = CVec::Zero(n);
  if (oversampling == 1) {
    padded = spectrum;
  } else {
    padded.head(k / 2) = spectrum.head(k / 2);
    padded.tail(k / 2) = spectrum.tail(k / 2);
  }
  CVec time(n);
  fft_engine().inv(time, padded);
  // Eigen's inverse carries 1/n; rescale to the unitary convention so
  // sample energy equals symbol energy.
  time *= std::sqrt(static_cast<double>(n));
  return time;
}

CVec ofdm_demodulate(const CVec& time, int k_total) {
  const Eigen::Index n = time.size();
  if (k_total < 1 || n < k_total || n % k_total)
    throw std::invalid_argument("time length must be a positive multiple of k_total");
  const Eigen::Index k = k_total;
  if (n > k && (k & 1)) throw std::invalid_argument("oversampled input requires even k_total");

  CVec bins(n);
  CVec in = time;  // Eigen::FFT wants a non-expression lvalue
  fft_engine().fwd(bins, in);
  bins /= std::sqrt(static_cast<double>(n));
  if (n == k) return bins;
  CVec out(k);
  out.head(k / 2) = bins.head(k / 2);
  out.tail(k / 2) = bins.tail(k / 2);
  return out;
}

double papr_linear(const CVec& signal) {
  if (signal.size() == 0) throw std::invalid_argument("empty signal");
  const double mean = mean_power(signal);
  if (mean <= 0.0) throw std::invalid_argument("papr of an all-zero signal is undefined");
  const double peak = signal.cwiseAbs2().maxCoeff();
  return peak / mean;
}

double papr_db(const CVec& signal) { return 10.0 * std::log10(papr_linear(signal)); }

std::vector<double> ccdf(const std::vector<double>& values,
                         const std::vector<double>& thresholds) {
  if (values.empty()) throw std::invalid_argument("ccdf needs at least one value");
  std::vector<double> out(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    std::size_t count = 0;
    for (double v : values)
      if (v > thresholds[i]) ++count;
    out[i] = static_cast<double>(count) / static_cast<double>(values.size());
  }
  return out;
}

FrequencyFrame assemble_frame(const MimoConfig& mimo,
                              const SubcarrierPartition& partition,
                              const CMat& stream_symbols,
                              const CMat& tr_symbols,
                              const std::vector<CMat>& precoders) {
  validate(mimo);
  if (partition.k_total != mimo.n_subcarriers)
    throw std::invalid_argument("partition does not match n_subcarriers");
  const Eigen::Index n_info = partition.k_im() + partition.k_qam();
  if (stream_symbols.rows() != mimo.n_streams || stream_symbols.cols() != n_info)
    throw std::invalid_argument("stream_symbols must be n_streams x (k_im + k_qam)");
  if (tr_symbols.rows() != mimo.n_tx || tr_symbols.cols() != partition.k_tr())
    throw std::invalid_argument("tr_symbols must be n_tx x k_tr");
  if (static_cast<int>(precoders.size()) != partition.k_total)
    throw std::invalid_argument("one precoder per subcarrier required");

  FrequencyFrame frame;
  frame.partition = partition;
  frame.stream_symbols = stream_symbols;
  frame.tr_symbols = tr_symbols;
  frame.antenna_grid = CMat::Zero(mimo.n_tx, partition.k_total);

  for (int j = 0; j < partition.k_tr(); ++j)
    frame.antenna_grid.col(partition.set_tr[static_cast<std::size_t>(j)]) = tr_symbols.col(j);

  Eigen::Index col = 0;
  auto place = [&](const std::vector<int>& set) {
    for (int k : set) {
      const CMat& w = precoders[static_cast<std::size_t>(k)];
      if (w.rows() != mimo.n_tx || w.cols() != mimo.n_streams)
        throw std::invalid_argument("precoder must be n_tx x n_streams");
      frame.antenna_grid.col(k) = w * stream_symbols.col(col);
      ++col;
    }
  };
  place(partition.set_im);
  place(partition.set_qam);
  return frame;
}

}  // namespace swipt
