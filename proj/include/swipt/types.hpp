// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace swipt {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Raised when a requested operating point or allocation has no feasible
// solution.  The CLI maps this to its own exit code, distinct from usage
// errors.
struct infeasible_error : std::runtime_error {
  explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

struct MimoConfig {
  int n_tx = 4;
  int n_rx = 4;
  int n_streams = 4;
  int n_subcarriers = 1024;
  int oversampling = 8;
  double subcarrier_spacing_hz = 15e3;
  int qam_bits = 2;  // bits per QAM symbol, even (2 = QPSK)
};

void validate(const MimoConfig& m);

// One antenna's complex baseband samples over a frame.
struct TimeSignal {
  CVec samples;
  double sample_rate_hz = 0.0;
};

inline double mean_power(const CVec& s) {
  if (s.size() == 0) return 0.0;
  return s.squaredNorm() / static_cast<double>(s.size());
}

}  // namespace swipt
