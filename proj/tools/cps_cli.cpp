// Command-line surface for the CPS library: proximal-operator tables, the 1D
// frequency-domain denoising study, 2D restoration, gamma sweeps, and MIMO
// error-recovery BER curves. Every subcommand is a pure function of
// (config, seed): outputs are buffered and written at the end, so reruns
// overwrite byte-identical files and aborted runs leave nothing partial.
#include "CLI11.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "cps/csv.hpp"
#include "cps/experiments.hpp"
#include "cps/image.hpp"
#include "cps/linops.hpp"
#include "cps/metrics.hpp"
#include "cps/mimo.hpp"
#include "cps/penalties.hpp"
#include "cps/solver.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::uint64_t seed = 7;
  std::string out = ".";
  int threads = 1;
  bool full_scale = false;

  fs::path out_path(const std::string& name) const { return fs::path(out) / name; }
};

void prepare_out_dir(const Common& common) {
  std::error_code ec;
  fs::create_directories(common.out, ec);
  if (ec || !fs::is_directory(common.out))
    throw std::invalid_argument("output directory '" + common.out +
                                "' cannot be created");
}

cps::ImageGrid load_or_phantom(const std::string& image, int size) {
  if (image.empty()) {
    if (size < 1) throw std::invalid_argument("size must be positive");
    return cps::phantom(size, size);
  }
  if (!fs::exists(image))
    throw std::invalid_argument("image '" + image + "' does not exist");
  return cps::read_image(image);
}

// ---------------------------------------------------------------------------
// prox-table
// ---------------------------------------------------------------------------

struct ProxTableCmd {
  double x_min = -8.0, x_max = 8.0;
  int x_count = 401;
  double threshold = 1.0;
  double mu = 1.0;
  std::vector<double> gammas = {0.2, 1.0, 5.0};

  void attach(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("prox-table",
                                       "Tabulate soft/hard/Cauchy proximal curves");
    sub->fallthrough();
    sub->add_option("--x_min", x_min, "Grid start");
    sub->add_option("--x_max", x_max, "Grid end");
    sub->add_option("--x_count", x_count, "Grid size")->check(CLI::PositiveNumber);
    sub->add_option("--threshold", threshold, "Soft/hard threshold");
    sub->add_option("--mu", mu, "Cauchy prox step size");
    sub->add_option("--gammas", gammas, "Cauchy dispersion values, one column each");
  }

  void run(const Common& common) const {
    if (x_count < 2 || !(x_max > x_min))
      throw std::invalid_argument("prox-table: need x_min < x_max and x_count >= 2");
    if (!(threshold >= 0.0)) throw std::invalid_argument("prox-table: negative threshold");
    if (gammas.empty()) throw std::invalid_argument("prox-table: no gammas given");
    for (double g : gammas)
      if (!(g > 0.0)) throw std::invalid_argument("prox-table: gammas must be positive");

    std::vector<std::string> cols = {"x", "soft", "hard"};
    for (std::size_t k = 0; k < gammas.size(); ++k)
      cols.push_back("cauchy_g" + std::to_string(k + 1));
    cps::CsvTable table(std::move(cols));
    for (int i = 0; i < x_count; ++i) {
      const double x = x_min + (x_max - x_min) * i / (x_count - 1);
      std::vector<cps::CsvTable::Cell> row{x, cps::prox_l1(x, threshold),
                                           cps::prox_hard(x, threshold)};
      for (double g : gammas) row.emplace_back(cps::prox_cauchy(x, g, mu));
      table.add_row(std::move(row));
    }
    table.save(common.out_path("prox_table.csv").string());
  }
};

// ---------------------------------------------------------------------------
// denoise1d
// ---------------------------------------------------------------------------

struct Denoise1DCmd {
  std::vector<int> ms = {128, 256, 512};
  std::vector<int> ns = {512, 2048, 8192};  // ratios 0.25, 0.125, 0.0625
  int trials = 20;
  std::vector<double> snrs = {2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
  double gamma_multiplier = 0.08;  // calibrated at SNR 4 dB, m/n = 0.25
  double l1_lambda = 1.4;
  double tv_lambda = 7.0;
  double step_factor = 1.5;
  double eps = 1e-3;
  int max_iter = 500;

  void attach(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "denoise1d", "Heavy Sine denoising study over SNR and sampling ratio");
    sub->fallthrough();
    sub->add_option("--ms", ms, "Time sample counts, paired with --ns");
    sub->add_option("--ns", ns, "Spectrum lengths, paired with --ms");
    sub->add_option("--trials", trials, "Noise realizations per cell")
        ->check(CLI::PositiveNumber);
    sub->add_option("--snrs", snrs, "SNR grid in dB");
    sub->add_option("--gamma_multiplier", gamma_multiplier,
                    "Cauchy gamma as a multiple of sqrt(mu)/2; values below 1 "
                    "leave the guaranteed-convergence regime");
    sub->add_option("--l1_lambda", l1_lambda, "L1 weight");
    sub->add_option("--tv_lambda", tv_lambda, "TV weight");
    sub->add_option("--step_factor", step_factor, "mu = step_factor / L");
    sub->add_option("--eps", eps, "Relative-change stopping tolerance");
    sub->add_option("--max_iter", max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  }

  void run(const Common& common) const {
    if (snrs.empty() || ms.empty())
      throw std::invalid_argument("denoise1d: snrs and ms must be non-empty");
    if (!(gamma_multiplier > 0.0))
      throw std::invalid_argument("denoise1d: gamma_multiplier must be positive");
    if (ms.size() != ns.size())
      throw std::invalid_argument("denoise1d: ms and ns must pair up");
    for (std::size_t i = 0; i < ms.size(); ++i)
      if (ms[i] < 1 || ms[i] > ns[i])
        throw std::invalid_argument("denoise1d: need 1 <= m <= n for every pair");

    cps::CsvTable trials_csv(
        {"ratio", "m", "n", "snr_db", "penalty", "trial", "rmse", "mae"});
    cps::CsvTable summary_csv(
        {"ratio", "m", "n", "snr_db", "penalty", "mean_rmse", "mean_mae", "sigma"});
    cps::CsvTable example_csv({"index", "clean", "noisy", "cauchy", "l1", "tv"});

    const char* names[] = {"cauchy", "l1", "tv"};
    for (std::size_t pair = 0; pair < ms.size(); ++pair) {
      const int m = ms[pair];
      const int n = ns[pair];
      const double ratio = static_cast<double>(m) / n;

      cps::Denoise1DParams params;
      params.m = m;
      params.n = n;
      params.trials = trials;
      params.step_factor = step_factor;
      params.eps = eps;
      params.max_iter = max_iter;
      params.seed = common.seed;
      params.threads = common.threads;

      const cps::Denoise1DSetup setup = cps::denoise_1d_setup(params);
      const double gamma = gamma_multiplier * cps::gamma_min_step(setup.mu);
      const cps::PenaltySpec penalties[] = {cps::PenaltySpec::cauchy(gamma),
                                            cps::PenaltySpec::l1(l1_lambda),
                                            cps::PenaltySpec::tv(tv_lambda)};

      for (double snr : snrs) {
        params.snr_db = snr;
        std::vector<cps::Denoise1DOutput> outs;
        for (const cps::PenaltySpec& pen : penalties)
          outs.push_back(cps::run_denoise_1d(params, pen));

        for (int p = 0; p < 3; ++p) {
          for (int t = 0; t < trials; ++t)
            trials_csv.add_row({ratio, std::int64_t{m}, std::int64_t{n}, snr,
                                std::string(names[p]), std::int64_t{t},
                                outs[p].trial_rmse[t], outs[p].trial_mae[t]});
          summary_csv.add_row({ratio, std::int64_t{m}, std::int64_t{n}, snr,
                               std::string(names[p]), outs[p].mean_rmse,
                               outs[p].mean_mae, outs[p].sigma});
        }
        if (pair == 0 && snr == snrs.front())
          for (int i = 0; i < m; ++i)
            example_csv.add_row({std::int64_t{i}, outs[0].example_clean[i],
                                 outs[0].example_noisy[i], outs[0].example_estimate[i],
                                 outs[1].example_estimate[i], outs[2].example_estimate[i]});
      }
    }

    trials_csv.save(common.out_path("denoise1d_trials.csv").string());
    summary_csv.save(common.out_path("denoise1d_summary.csv").string());
    example_csv.save(common.out_path("denoise1d_example.csv").string());
  }
};

// ---------------------------------------------------------------------------
// restore2d
// ---------------------------------------------------------------------------

struct Restore2DCmd {
  std::string task = "deblur";
  std::string image;  // empty -> phantom
  int size = 256;
  double snr_db = 20.0;
  double bsnr_db = 40.0;
  int psf_side = 5;
  double psf_sigma = 1.0;
  double l1_lambda = 0.01;
  double tv_lambda = 0.1;
  int tv_inner_iters = 50;
  int sweep_count = 8;
  double sweep_lo = 1.0, sweep_hi = 50.0;
  double step_factor = 1.5;
  double eps = 1e-3;
  int max_iter = 250;

  void attach(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "restore2d", "Denoise or deblur an image with L1/TV/Cauchy penalties");
    sub->fallthrough();
    sub->add_option("--task", task, "denoise or deblur")
        ->check(CLI::IsMember({"denoise", "deblur"}));
    sub->add_option("--image", image, "Input image (PGM/PNG); empty uses the phantom");
    sub->add_option("--size", size, "Phantom side length")->check(CLI::PositiveNumber);
    sub->add_option("--snr_db", snr_db, "Denoise task SNR");
    sub->add_option("--bsnr_db", bsnr_db, "Deblur task blurred SNR");
    sub->add_option("--psf_side", psf_side, "Gaussian PSF side (odd)");
    sub->add_option("--psf_sigma", psf_sigma, "Gaussian PSF width");
    sub->add_option("--l1_lambda", l1_lambda, "L1 weight");
    sub->add_option("--tv_lambda", tv_lambda, "TV weight");
    sub->add_option("--tv_inner_iters", tv_inner_iters, "Chambolle sweeps per prox")
        ->check(CLI::PositiveNumber);
    sub->add_option("--sweep_count", sweep_count, "Gamma sweep resolution for gamma_opt")
        ->check(CLI::PositiveNumber);
    sub->add_option("--sweep_lo", sweep_lo, "Sweep start, multiples of sqrt(mu)/2");
    sub->add_option("--sweep_hi", sweep_hi, "Sweep end, multiples of sqrt(mu)/2");
    sub->add_option("--step_factor", step_factor, "mu = step_factor / L");
    sub->add_option("--eps", eps, "Relative-change stopping tolerance");
    sub->add_option("--max_iter", max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  }

  void run(const Common& common) const {
    const cps::ImageGrid img = load_or_phantom(image, size);

    cps::Restore2DParams params;
    params.task = task == "denoise" ? cps::RestoreTask::Denoise : cps::RestoreTask::Deblur;
    params.snr_db = snr_db;
    params.bsnr_db = bsnr_db;
    params.psf_side = psf_side;
    params.psf_sigma = psf_sigma;
    params.step_factor = step_factor;
    params.eps = eps;
    params.max_iter = max_iter;
    params.seed = common.seed;
    params.threads = common.threads;

    const double gamma_boundary =
        cps::gamma_min_step(cps::restore_2d_setup(img, params).mu);

    // pick gamma_opt by PSNR over a log-spaced multiplier sweep
    if (!(sweep_hi > sweep_lo) || !(sweep_lo > 0.0))
      throw std::invalid_argument("restore2d: need 0 < sweep_lo < sweep_hi");
    std::vector<double> sweep_gammas;
    if (sweep_count == 1) {
      sweep_gammas.push_back(sweep_lo * gamma_boundary);
    } else {
      for (double mult : cps::log_space(sweep_lo, sweep_hi, sweep_count))
        sweep_gammas.push_back(mult * gamma_boundary);
    }
    const cps::SweepResult sweep = cps::sweep_gamma_2d(img, params, sweep_gammas);
    std::size_t best = 0;
    for (std::size_t i = 1; i < sweep.psnr.size(); ++i)
      if (sweep.psnr[i] > sweep.psnr[best]) best = i;
    const double gamma_opt = sweep.gammas[best];

    struct Entry {
      std::string name;
      cps::PenaltySpec penalty;
      double gamma;  // 0 when not a Cauchy run
    };
    const std::vector<Entry> entries = {
        {"l1", cps::PenaltySpec::l1(l1_lambda), 0.0},
        {"tv", cps::PenaltySpec::tv(tv_lambda, tv_inner_iters), 0.0},
        {"cauchy_boundary", cps::PenaltySpec::cauchy(gamma_boundary), gamma_boundary},
        {"cauchy_opt", cps::PenaltySpec::cauchy(gamma_opt), gamma_opt},
    };

    cps::CsvTable metrics({"penalty", "gamma", "psnr", "rmse", "ssim", "iterations",
                           "converged"});
    std::vector<std::pair<std::string, cps::ImageGrid>> outputs;
    outputs.emplace_back("original.pgm", img);

    bool degraded_saved = false;
    for (const Entry& entry : entries) {
      const cps::Restore2DResult res = cps::run_restore_2d(img, params, entry.penalty);
      if (!degraded_saved) {
        metrics.add_row({std::string("degraded"), 0.0, res.psnr_degraded,
                         res.rmse_degraded, res.ssim_degraded, std::int64_t{0},
                         std::int64_t{0}});
        outputs.emplace_back("degraded.pgm", res.degraded);
        degraded_saved = true;
      }
      metrics.add_row({entry.name, entry.gamma, res.psnr_est, res.rmse_est, res.ssim_est,
                       std::int64_t{res.iterations}, std::int64_t{res.converged ? 1 : 0}});
      outputs.emplace_back("restored_" + entry.name + ".pgm", res.estimate);
    }

    metrics.save(common.out_path("restore2d_metrics.csv").string());
    for (const auto& [name, grid] : outputs)
      cps::write_pgm(grid, common.out_path(name).string());
  }
};

// ---------------------------------------------------------------------------
// sweep-gamma
// ---------------------------------------------------------------------------

struct SweepGammaCmd {
  std::string mode = "1d";
  int count = 20;
  double mult_min = 0.01, mult_max = 50.0;
  // 1d problem
  int m = 128, n = 512;
  double snr_db = 20.0;
  // 2d problem
  std::string task = "denoise";
  std::string image;
  int size = 128;
  double bsnr_db = 40.0;
  int psf_side = 5;
  double psf_sigma = 1.0;
  // shared solver knobs
  double step_factor = 1.5;
  double eps = 1e-3;
  int max_iter = 500;

  void attach(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "sweep-gamma", "RMSE/PSNR as a function of the Cauchy dispersion");
    sub->fallthrough();
    sub->add_option("--mode", mode, "1d or 2d")->check(CLI::IsMember({"1d", "2d"}));
    sub->add_option("--count", count, "Number of gamma points")
        ->check(CLI::Range(2, 10000));
    sub->add_option("--mult_min", mult_min, "Smallest gamma, multiples of sqrt(mu)/2");
    sub->add_option("--mult_max", mult_max, "Largest gamma, multiples of sqrt(mu)/2");
    sub->add_option("--m", m, "1d: time samples")->check(CLI::PositiveNumber);
    sub->add_option("--n", n, "1d: spectrum length")->check(CLI::PositiveNumber);
    sub->add_option("--snr_db", snr_db, "Noise level (1d and 2d denoise)");
    sub->add_option("--task", task, "2d: denoise or deblur")
        ->check(CLI::IsMember({"denoise", "deblur"}));
    sub->add_option("--image", image, "2d: input image; empty uses the phantom");
    sub->add_option("--size", size, "2d: phantom side length")->check(CLI::PositiveNumber);
    sub->add_option("--bsnr_db", bsnr_db, "2d deblur: blurred SNR");
    sub->add_option("--psf_side", psf_side, "2d: Gaussian PSF side (odd)");
    sub->add_option("--psf_sigma", psf_sigma, "2d: Gaussian PSF width");
    sub->add_option("--step_factor", step_factor, "mu = step_factor / L");
    sub->add_option("--eps", eps, "Relative-change stopping tolerance");
    sub->add_option("--max_iter", max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  }

  void run(const Common& common) const {
    if (!(mult_max > mult_min) || !(mult_min > 0.0))
      throw std::invalid_argument("sweep-gamma: need 0 < mult_min < mult_max");

    cps::SweepResult sweep;
    if (mode == "1d") {
      cps::Denoise1DParams params;
      params.m = m;
      params.n = n;
      params.snr_db = snr_db;
      params.step_factor = step_factor;
      params.eps = eps;
      params.max_iter = max_iter;
      params.seed = common.seed;
      params.threads = common.threads;
      const double boundary = cps::gamma_min_step(cps::denoise_1d_setup(params).mu);
      std::vector<double> gammas;
      for (double mult : cps::log_space(mult_min, mult_max, count))
        gammas.push_back(mult * boundary);
      sweep = cps::sweep_gamma_1d(params, gammas);
    } else {
      const cps::ImageGrid img = load_or_phantom(image, size);
      cps::Restore2DParams params;
      params.task = task == "denoise" ? cps::RestoreTask::Denoise
                                      : cps::RestoreTask::Deblur;
      params.snr_db = snr_db;
      params.bsnr_db = bsnr_db;
      params.psf_side = psf_side;
      params.psf_sigma = psf_sigma;
      params.step_factor = step_factor;
      params.eps = eps;
      params.max_iter = max_iter;
      params.seed = common.seed;
      params.threads = common.threads;
      const double boundary = cps::gamma_min_step(cps::restore_2d_setup(img, params).mu);
      std::vector<double> gammas;
      for (double mult : cps::log_space(mult_min, mult_max, count))
        gammas.push_back(mult * boundary);
      sweep = cps::sweep_gamma_2d(img, params, gammas);
    }

    const bool has_psnr = !sweep.psnr.empty();
    std::vector<std::string> cols = {"gamma", "rmse"};
    if (has_psnr) cols.push_back("psnr");
    cols.push_back("critical_frame");
    cols.push_back("critical_step");
    cps::CsvTable table(std::move(cols));
    for (std::size_t i = 0; i < sweep.gammas.size(); ++i) {
      std::vector<cps::CsvTable::Cell> row{sweep.gammas[i], sweep.rmse[i]};
      if (has_psnr) row.emplace_back(sweep.psnr[i]);
      row.emplace_back(sweep.critical_frame);
      row.emplace_back(sweep.critical_step);
      table.add_row(std::move(row));
    }
    table.save(common.out_path("sweep_gamma.csv").string());
  }
};

// ---------------------------------------------------------------------------
// mimo-ber
// ---------------------------------------------------------------------------

struct MimoBerCmd {
  int n_tx = 16, n_rx = 16;
  std::string constellation = "qpsk";
  std::vector<double> snrs = {0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0};
  int n_symbols = 10000;
  int n_trials = 10;
  double gamma_multiplier = 30.0;
  double step_factor = 1.5;
  double eps = 1e-3;
  int max_iter = 100;

  void attach(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "mimo-ber", "ZF / MMSE / Cauchy-recovery BER over an SNR grid");
    sub->fallthrough();
    sub->add_option("--n_tx", n_tx, "Transmit antennas")->check(CLI::PositiveNumber);
    sub->add_option("--n_rx", n_rx, "Receive antennas")->check(CLI::PositiveNumber);
    sub->add_option("--constellation", constellation, "qpsk or 16qam")
        ->check(CLI::IsMember({"qpsk", "16qam"}));
    sub->add_option("--snrs", snrs, "Per-receive-antenna SNR grid in dB");
    sub->add_option("--n_symbols", n_symbols, "Symbols per trial (multiple of n_tx)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--n_trials", n_trials, "Channel trials per SNR point")
        ->check(CLI::PositiveNumber);
    sub->add_option("--gamma_multiplier", gamma_multiplier,
                    "Cauchy gamma as a multiple of sqrt(mu)/2");
    sub->add_option("--step_factor", step_factor, "mu = step_factor / L");
    sub->add_option("--eps", eps, "Relative-change stopping tolerance");
    sub->add_option("--max_iter", max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  }

  void run(const Common& common) const {
    cps::MimoScenario sc;
    sc.n_tx = n_tx;
    sc.n_rx = n_rx;
    sc.constellation = constellation == "qpsk" ? cps::Constellation::qpsk()
                                               : cps::Constellation::qam16();
    sc.snr_grid_db = snrs;
    sc.n_symbols = common.full_scale ? 100000 : n_symbols;
    sc.n_trials = common.full_scale ? 100 : n_trials;
    sc.seed = common.seed;
    sc.threads = common.threads;
    sc.recovery.gamma_multiplier = gamma_multiplier;
    sc.recovery.step_factor = step_factor;
    sc.recovery.eps = eps;
    sc.recovery.max_iter = max_iter;

    const cps::RecoveryResult res = cps::run_ber_curve(sc);

    cps::CsvTable table(
        {"snr_db", "ber_zf", "ber_mmse", "ber_cauchy", "trials", "symbols"});
    for (std::size_t i = 0; i < res.snr_db.size(); ++i)
      table.add_row({res.snr_db[i], res.ber_zf[i], res.ber_mmse[i], res.ber_cauchy[i],
                     std::int64_t{sc.n_trials},
                     std::int64_t{sc.n_symbols} * sc.n_trials});
    table.save(common.out_path("mimo_ber.csv").string());
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cauchy proximal splitting experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file with per-subcommand tables");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Common common;
  app.add_option("--seed", common.seed, "Master random seed");
  app.add_option("--out", common.out, "Output directory (created if missing)");
  app.add_option("--threads", common.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  app.add_flag("--full-scale", common.full_scale,
               "Paper-scale MIMO run (1e5 symbols x 100 trials)");

  ProxTableCmd prox_cmd;
  Denoise1DCmd denoise_cmd;
  Restore2DCmd restore_cmd;
  SweepGammaCmd sweep_cmd;
  MimoBerCmd mimo_cmd;
  prox_cmd.attach(app);
  denoise_cmd.attach(app);
  restore_cmd.attach(app);
  sweep_cmd.attach(app);
  mimo_cmd.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit clean, bad config exits 2
  }

  try {
    prepare_out_dir(common);
    if (app.got_subcommand("prox-table")) prox_cmd.run(common);
    if (app.got_subcommand("denoise1d")) denoise_cmd.run(common);
    if (app.got_subcommand("restore2d")) restore_cmd.run(common);
    if (app.got_subcommand("sweep-gamma")) sweep_cmd.run(common);
    if (app.got_subcommand("mimo-ber")) mimo_cmd.run(common);
  } catch (const cps::divergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
