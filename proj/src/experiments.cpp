#include "cps/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cps/metrics.hpp"
#include "cps/parallel.hpp"
#include "cps/solver.hpp"

namespace cps {

SignalVec heavy_sine(int m) {
  if (m < 1) throw std::invalid_argument("heavy_sine: length must be positive");
  auto sgn = [](double v) { return v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0; };
  SignalVec s(m);
  for (int k = 0; k < m; ++k) {
    const double t = static_cast<double>(k) / m;
    s[k] = 4.0 * std::sin(4.0 * std::numbers::pi * t) - sgn(t - 0.3) - sgn(0.72 - t);
  }
  return s;
}

NoisySignal add_awgn(std::span<const double> s, double snr_db, RandomStream& rng) {
  if (s.empty()) throw std::invalid_argument("add_awgn: empty signal");
  double power = 0.0;
  for (double v : s) power += v * v;
  power /= static_cast<double>(s.size());
  NoisySignal out;
  out.sigma = power == 0.0 ? 0.0 : std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  out.samples.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    out.samples[i] = s[i] + out.sigma * rng.normal();
  return out;
}

NoisySignal add_awgn(std::span<const double> s, double snr_db, std::uint64_t seed) {
  RandomStream rng(seed);
  return add_awgn(s, snr_db, rng);
}

double sigma_from_bsnr(std::span<const double> blurred, double bsnr_db) {
  if (blurred.empty()) throw std::invalid_argument("sigma_from_bsnr: empty signal");
  double mean = 0.0;
  for (double v : blurred) mean += v;
  mean /= static_cast<double>(blurred.size());
  double var = 0.0;
  for (double v : blurred) var += (v - mean) * (v - mean);
  var /= static_cast<double>(blurred.size());
  return std::sqrt(var / std::pow(10.0, bsnr_db / 10.0));
}

std::vector<double> log_space(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("log_space: need 0 < lo < hi");
  if (count < 2) throw std::invalid_argument("log_space: need at least 2 points");
  std::vector<double> out(count);
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < count; ++i)
    out[i] = std::pow(10.0, llo + (lhi - llo) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

ImageGrid phantom(int rows, int cols) {
  ImageGrid img(rows, cols);
  struct Ellipse {
    double cx, cy, a, b, value;
  };
  // Centers and semi-axes in [-1,1] coordinates; later shapes overwrite.
  static constexpr Ellipse shapes[] = {
      {0.00, 0.00, 0.88, 0.72, 200.0}, {-0.22, -0.18, 0.30, 0.38, 120.0},
      {0.28, 0.14, 0.22, 0.30, 230.0}, {0.10, 0.48, 0.14, 0.12, 10.0},
      {-0.05, 0.30, 0.10, 0.08, 160.0},
  };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double y = rows > 1 ? 2.0 * r / (rows - 1) - 1.0 : 0.0;
      const double x = cols > 1 ? 2.0 * c / (cols - 1) - 1.0 : 0.0;
      double v = 40.0;
      for (const Ellipse& e : shapes) {
        const double dx = (x - e.cx) / e.a, dy = (y - e.cy) / e.b;
        if (dx * dx + dy * dy <= 1.0) v = e.value;
      }
      img.at(r, c) = v;
    }
  return img;
}

namespace {

// MAP weighting of the data term; sigma = 0 degenerates to plain least squares.
double fidelity_weight_for(double sigma) {
  return sigma > 0.0 ? 1.0 / (sigma * sigma) : 1.0;
}

}  // namespace

Denoise1DSetup denoise_1d_setup(const Denoise1DParams& params) {
  if (params.m < 1 || params.n < params.m)
    throw std::invalid_argument("denoise_1d: need 1 <= m <= n");
  LinearOperator op = make_partial_idft(params.m, params.n);
  const OpnormEstimate est = opnorm_sq(op, 1e-12, 500, 99);
  const double mu = step_size_policy(est.value, params.step_factor);
  return {std::move(op), est.value, mu};
}

Denoise1DOutput run_denoise_1d(const Denoise1DParams& params, const PenaltySpec& penalty) {
  if (params.trials < 1)
    throw std::invalid_argument("run_denoise_1d: trials must be >= 1");
  const SignalVec clean = heavy_sine(params.m);
  const Denoise1DSetup setup = denoise_1d_setup(params);

  Denoise1DOutput out;
  out.mu = setup.mu;
  out.trial_rmse.resize(params.trials);
  out.trial_mae.resize(params.trials);

  parallel_for(params.trials, params.threads, [&](int t) {
    RandomStream rng(params.seed, static_cast<std::uint64_t>(t));
    const NoisySignal noisy = add_awgn(clean, params.snr_db, rng);

    std::vector<double> est;
    if (penalty.kind == PenaltySpec::Kind::Tv) {
      // TV is a direct time-domain denoiser: one exact prox of the
      // observation, no frame operator involved.
      est = prox_tv_1d(noisy.samples, penalty.scale, penalty.tv_inner_iters,
                       penalty.tv_inner_tol);
    } else {
      FBConfig cfg;
      cfg.mu = setup.mu;
      cfg.eps = params.eps;
      cfg.max_iter = params.max_iter;
      cfg.lipschitz = setup.lipschitz;
      const FBResult res = fb_solve(noisy.samples, setup.op, penalty, cfg);
      est = setup.op.apply(res.x_hat);
    }

    out.trial_rmse[t] = rmse(clean, est);
    out.trial_mae[t] = mae(clean, est);
    if (t == 0) {
      out.sigma = noisy.sigma;
      out.example_clean = clean;
      out.example_noisy = noisy.samples;
      out.example_estimate = std::move(est);
    }
  });

  for (int t = 0; t < params.trials; ++t) {
    out.mean_rmse += out.trial_rmse[t];
    out.mean_mae += out.trial_mae[t];
  }
  out.mean_rmse /= params.trials;
  out.mean_mae /= params.trials;
  return out;
}

namespace {

struct Problem2D {
  LinearOperator op;
  double lipschitz;
  std::vector<double> y;
  double sigma;
};

Problem2D setup_2d(const ImageGrid& img, const Restore2DParams& params) {
  const std::size_t npix = img.size();
  RandomStream rng(params.seed, 0);
  if (params.task == RestoreTask::Denoise) {
    NoisySignal noisy = add_awgn(img.pixels, params.snr_db, rng);
    return {make_identity(static_cast<int>(npix)), 1.0, std::move(noisy.samples),
            noisy.sigma};
  }
  const Psf2D psf = gaussian_psf(params.psf_side, params.psf_sigma);
  LinearOperator op = make_conv2d(psf, img.rows, img.cols);
  const double lipschitz = conv_opnorm_sq(psf, img.rows, img.cols);
  std::vector<double> y = op.apply(img.pixels);
  const double sigma = sigma_from_bsnr(y, params.bsnr_db);
  for (double& v : y) v += sigma * rng.normal();
  return {std::move(op), lipschitz, std::move(y), sigma};
}

PenaltySpec shaped_penalty(const PenaltySpec& penalty, const ImageGrid& img) {
  if (penalty.kind == PenaltySpec::Kind::Tv && penalty.tv_rows == 0)
    return PenaltySpec::tv(penalty.scale, penalty.tv_inner_iters,
                           penalty.tv_inner_tol, img.rows, img.cols);
  return penalty;
}

ImageGrid to_grid(std::vector<double> pixels, const ImageGrid& like) {
  ImageGrid g(like.rows, like.cols);
  g.peak = like.peak;
  g.pixels = std::move(pixels);
  return g;
}

double ssim_or_nan(const ImageGrid& ref, const ImageGrid& est) {
  if (ref.rows < 11 || ref.cols < 11)
    return std::numeric_limits<double>::quiet_NaN();
  return ssim(ref, est);
}

}  // namespace

Restore2DSetup restore_2d_setup(const ImageGrid& img, const Restore2DParams& params) {
  Restore2DSetup setup;
  if (params.task == RestoreTask::Denoise) {
    setup.lipschitz = 1.0;
    double power = 0.0;
    for (double v : img.pixels) power += v * v;
    power /= static_cast<double>(img.size());
    setup.sigma = power == 0.0
                      ? 0.0
                      : std::sqrt(power / std::pow(10.0, params.snr_db / 10.0));
  } else {
    const Psf2D psf = gaussian_psf(params.psf_side, params.psf_sigma);
    setup.lipschitz = conv_opnorm_sq(psf, img.rows, img.cols);
    const LinearOperator op = make_conv2d(psf, img.rows, img.cols);
    setup.sigma = sigma_from_bsnr(op.apply(img.pixels), params.bsnr_db);
  }
  setup.fidelity_weight = fidelity_weight_for(setup.sigma);
  setup.mu = step_size_policy(setup.fidelity_weight * setup.lipschitz,
                              params.step_factor);
  return setup;
}

Restore2DResult run_restore_2d(const ImageGrid& img, const Restore2DParams& params,
                               const PenaltySpec& penalty) {
  Problem2D prob = setup_2d(img, params);
  const PenaltySpec pen = shaped_penalty(penalty, img);
  const double weight = fidelity_weight_for(prob.sigma);

  FBConfig cfg;
  cfg.mu = step_size_policy(weight * prob.lipschitz, params.step_factor);
  cfg.eps = params.eps;
  cfg.max_iter = params.max_iter;
  cfg.fidelity_weight = weight;
  cfg.lipschitz = weight * prob.lipschitz;
  const FBResult res = fb_solve(prob.y, prob.op, pen, cfg);

  Restore2DResult out;
  out.sigma = prob.sigma;
  out.mu = cfg.mu;
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.degraded = to_grid(std::move(prob.y), img);
  out.estimate = to_grid(res.x_hat, img);
  out.psnr_est = psnr(img, out.estimate);
  out.rmse_est = rmse(img.pixels, out.estimate.pixels);
  out.ssim_est = ssim_or_nan(img, out.estimate);
  out.psnr_degraded = psnr(img, out.degraded);
  out.rmse_degraded = rmse(img.pixels, out.degraded.pixels);
  out.ssim_degraded = ssim_or_nan(img, out.degraded);
  return out;
}

namespace {

void check_gammas(std::span<const double> gammas) {
  if (gammas.empty()) throw std::invalid_argument("gamma sweep: empty gamma grid");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0))
      throw std::invalid_argument("gamma sweep: gammas must be positive");
    if (i > 0 && !(gammas[i] > gammas[i - 1]))
      throw std::invalid_argument("gamma sweep: gammas must be strictly increasing");
  }
}

}  // namespace

SweepResult sweep_gamma_1d(const Denoise1DParams& params, std::span<const double> gammas) {
  check_gammas(gammas);
  const SignalVec clean = heavy_sine(params.m);
  const Denoise1DSetup setup = denoise_1d_setup(params);
  RandomStream rng(params.seed, 0);
  const NoisySignal noisy = add_awgn(clean, params.snr_db, rng);

  SweepResult sweep;
  sweep.gammas.assign(gammas.begin(), gammas.end());
  sweep.rmse.resize(gammas.size());
  sweep.critical_frame = noisy.sigma / 2.0;  // tight frame side has r = 1
  sweep.critical_step = gamma_min_step(setup.mu);

  parallel_for(static_cast<int>(gammas.size()), params.threads, [&](int i) {
    FBConfig cfg;
    cfg.mu = setup.mu;
    cfg.eps = params.eps;
    cfg.max_iter = params.max_iter;
    cfg.lipschitz = setup.lipschitz;
    const FBResult res =
        fb_solve(noisy.samples, setup.op, PenaltySpec::cauchy(gammas[i]), cfg);
    sweep.rmse[i] = rmse(clean, setup.op.apply(res.x_hat));
  });
  return sweep;
}

SweepResult sweep_gamma_2d(const ImageGrid& img, const Restore2DParams& params,
                           std::span<const double> gammas) {
  check_gammas(gammas);
  Problem2D prob = setup_2d(img, params);
  const double weight = fidelity_weight_for(prob.sigma);
  const double mu = step_size_policy(weight * prob.lipschitz, params.step_factor);

  SweepResult sweep;
  sweep.gammas.assign(gammas.begin(), gammas.end());
  sweep.rmse.resize(gammas.size());
  sweep.psnr.resize(gammas.size());
  sweep.critical_frame = prob.sigma / 2.0;  // r = 1 convention
  sweep.critical_step = gamma_min_step(mu);

  parallel_for(static_cast<int>(gammas.size()), params.threads, [&](int i) {
    FBConfig cfg;
    cfg.mu = mu;
    cfg.eps = params.eps;
    cfg.max_iter = params.max_iter;
    cfg.fidelity_weight = weight;
    cfg.lipschitz = weight * prob.lipschitz;
    const FBResult res =
        fb_solve(prob.y, prob.op, PenaltySpec::cauchy(gammas[i]), cfg);
    const ImageGrid est = to_grid(res.x_hat, img);
    sweep.rmse[i] = rmse(img.pixels, est.pixels);
    sweep.psnr[i] = psnr(img, est);
  });
  return sweep;
}

}  // namespace cps
