#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cps/image.hpp"
#include "cps/linops.hpp"
#include "cps/penalties.hpp"
#include "cps/rng.hpp"

namespace cps {

using SignalVec = std::vector<double>;

// The "Heavy Sine" test signal 4 sin(4 pi t) - sign(t - 0.3) - sign(0.72 - t)
// sampled at t = k/m, k = 0..m-1, with sign(0) = 0.
SignalVec heavy_sine(int m);

struct NoisySignal {
  std::vector<double> samples;
  double sigma = 0.0;
};

// Adds white Gaussian noise at the requested SNR: sigma^2 = mean(s^2) /
// 10^(snr_db/10). The RandomStream overload draws from the caller's stream.
NoisySignal add_awgn(std::span<const double> s, double snr_db, RandomStream& rng);
NoisySignal add_awgn(std::span<const double> s, double snr_db, std::uint64_t seed);

// sigma = sqrt(var(blurred) / 10^(bsnr_db/10)) with population variance about
// the mean; a constant input yields the degenerate sigma = 0.
double sigma_from_bsnr(std::span<const double> blurred, double bsnr_db);

// count log10-spaced values from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, int count);

// Deterministic piecewise-constant ellipse phantom with values in [0, 255].
ImageGrid phantom(int rows, int cols);

// ---------------------------------------------------------------------------
// 1D frequency-domain denoising through the partial inverse-DFT frame.
// ---------------------------------------------------------------------------

struct Denoise1DParams {
  int m = 256;              // time samples observed
  int n = 1024;             // spectrum length (m/n is the sampling ratio)
  double snr_db = 4.0;
  int trials = 20;
  double step_factor = 1.5;  // mu = step_factor / L
  double eps = 1e-3;
  int max_iter = 500;
  std::uint64_t seed = 7;
  int threads = 1;
};

struct Denoise1DSetup {
  LinearOperator op;   // R^{2n} spectrum -> R^m time samples
  double lipschitz;    // largest eigenvalue of A^T A (1 for this frame)
  double mu;           // step_factor / lipschitz
};

// The 1D study keeps the plain (unweighted) data term 1/2 |y - Ax|^2, the
// form the splitting iteration is usually written in; the 2D tasks below use
// the MAP weighting instead. Both readings go through the same solver knob.
Denoise1DSetup denoise_1d_setup(const Denoise1DParams& params);

struct Denoise1DOutput {
  std::vector<double> trial_rmse, trial_mae;
  double mean_rmse = 0.0, mean_mae = 0.0;
  double sigma = 0.0;  // noise level of trial 0
  double mu = 0.0;
  std::vector<double> example_clean, example_noisy, example_estimate;  // trial 0
};

// Runs `trials` paired denoising trials: the trial-t noise realization is a
// pure function of (seed, t), so calls with different penalties see identical
// data. Cauchy/L1/Hard penalties are solved over the spectrum through the
// frame operator; the TV penalty is applied directly to the time-domain
// observation (one exact prox).
Denoise1DOutput run_denoise_1d(const Denoise1DParams& params, const PenaltySpec& penalty);

// ---------------------------------------------------------------------------
// 2D restoration (denoising at a target SNR / deblurring at a target BSNR).
// ---------------------------------------------------------------------------

enum class RestoreTask { Denoise, Deblur };

struct Restore2DParams {
  RestoreTask task = RestoreTask::Deblur;
  double snr_db = 20.0;   // Denoise noise level
  double bsnr_db = 40.0;  // Deblur noise level
  int psf_side = 5;
  double psf_sigma = 1.0;
  double step_factor = 1.5;
  double eps = 1e-3;
  int max_iter = 250;
  std::uint64_t seed = 7;
  int threads = 1;
};

struct Restore2DSetup {
  double lipschitz = 0.0;        // |A|^2: 1 for denoise, conv_opnorm_sq for deblur
  double sigma = 0.0;            // from snr_db (denoise) or bsnr_db (deblur)
  double fidelity_weight = 0.0;  // w = 1/sigma^2 (1 when sigma is 0)
  double mu = 0.0;               // step_factor / (w * lipschitz)
};

// Scalar problem constants without synthesizing the degraded image; the same
// values run_restore_2d uses internally. Handy for turning gamma multipliers
// into absolute dispersions.
Restore2DSetup restore_2d_setup(const ImageGrid& img, const Restore2DParams& params);

struct Restore2DResult {
  ImageGrid estimate{1, 1};
  ImageGrid degraded{1, 1};
  double psnr_est = 0.0, rmse_est = 0.0, ssim_est = 0.0;
  double psnr_degraded = 0.0, rmse_degraded = 0.0, ssim_degraded = 0.0;
  double sigma = 0.0;
  double mu = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Degrades the image per the task, solves with the penalty under the
// MAP-weighted data term (w = 1/sigma^2), and reports quality metrics for
// both the degraded input and the estimate. A TV penalty without a grid
// shape is re-shaped to the image automatically.
Restore2DResult run_restore_2d(const ImageGrid& img, const Restore2DParams& params,
                               const PenaltySpec& penalty);

// ---------------------------------------------------------------------------
// Gamma sweeps over a fixed degraded realization.
// ---------------------------------------------------------------------------

struct SweepResult {
  std::vector<double> gammas;
  std::vector<double> rmse;
  std::vector<double> psnr;      // filled for image sweeps only
  double critical_frame = 0.0;   // sigma / (2 sqrt(r))
  double critical_step = 0.0;    // sqrt(mu) / 2
};

SweepResult sweep_gamma_1d(const Denoise1DParams& params, std::span<const double> gammas);
SweepResult sweep_gamma_2d(const ImageGrid& img, const Restore2DParams& params,
                           std::span<const double> gammas);

}  // namespace cps
