#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "cps/rng.hpp"

namespace cps {

// Gray-mapped constellation with unit average symbol energy. points[label]
// is the symbol whose bit pattern equals `label`; a hard decision therefore
// yields its bits directly.
struct Constellation {
  enum class Kind { Qpsk, Qam16 };
  Kind kind = Kind::Qpsk;
  int bits_per_symbol = 2;
  std::vector<std::complex<double>> points;

  // {00,01,11,10} counterclockwise starting at (1+i)/sqrt(2).
  static Constellation qpsk();
  // Per-axis Gray code 00,01,11,10 -> -3,-1,+1,+3 on each of I/Q, scaled by
  // 1/sqrt(10); the first two bits select I, the last two select Q.
  static Constellation qam16();
};

// Nearest constellation point in Euclidean distance; exact ties keep the
// smaller bit label.
int slice_one(std::complex<double> soft, const Constellation& c);
std::vector<int> slice(const Eigen::VectorXcd& soft, const Constellation& c);

// Hamming distance between the bit patterns of two label sequences.
long long bit_errors(std::span<const int> sent, std::span<const int> detected);

// i.i.d. circularly-symmetric complex Gaussian entries of unit variance
// (real/imag each variance 1/2), filled row-major for reproducibility.
Eigen::MatrixXcd gen_channel(int m, int n, RandomStream& rng);
Eigen::MatrixXcd gen_channel(int m, int n, std::uint64_t seed);

// Least-squares (pseudo-inverse) equalization followed by slicing.
std::vector<int> zf_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                           const Constellation& c);

struct MmseResult {
  Eigen::VectorXcd soft;
  std::vector<int> hard;
};

// soft = (H^H H + sigma_v2 I)^{-1} H^H y, hard = slice(soft). Unit symbol
// energy folds the Es term into sigma_v2.
MmseResult mmse_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                       double sigma_v2, const Constellation& c);

struct RecoveryOptions {
  double gamma_multiplier = 30.0;  // gamma = multiplier * sqrt(mu)/2
  double step_factor = 1.5;        // mu = factor / L, default the 3/(2L) rule
  double eps = 1e-3;
  int max_iter = 100;
};

// Sparse error recovery: forms the residual y' = y - H s_hard, estimates the
// symbol-error vector e from y' = H e + v with the Cauchy-penalized solver on
// the real-composite model (fidelity weight 1/sigma_v2), and re-slices
// s_hard + e_hat. A zero residual returns s_hard unchanged.
std::vector<int> error_recover_cps(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                                   std::span<const int> s_hard, double sigma_v2,
                                   const Constellation& c,
                                   const RecoveryOptions& opts = {});

struct MimoScenario {
  int n_tx = 16;
  int n_rx = 16;
  Constellation constellation = Constellation::qpsk();
  std::vector<double> snr_grid_db = {0, 2.5, 5, 7.5, 10, 12.5, 15};
  int n_symbols = 10000;  // per trial; must be a multiple of n_tx
  int n_trials = 10;
  std::uint64_t seed = 7;
  int threads = 1;
  RecoveryOptions recovery;
};

struct RecoveryResult {
  std::vector<double> snr_db;
  std::vector<double> ber_zf, ber_mmse, ber_cauchy;
  long long symbols_counted = 0;  // n_symbols * n_trials * |snr grid|
};

// Per SNR point and trial: one channel draw, n_symbols/n_tx channel uses with
// fresh noise, ZF and MMSE detection, and CPS recovery seeded by the MMSE
// hard decisions. Per-receive-antenna SNR convention: n_tx * Es / sigma_v^2
// with Es = 1. Deterministic for a fixed seed under any thread count.
RecoveryResult run_ber_curve(const MimoScenario& scenario);

}  // namespace cps
