// Python bindings for the CPS core: proximal operators, linear operators,
// the forward-backward solver, the experiment harnesses, and the MIMO BER
// study. Vectors cross the boundary as 1D float64 arrays and images as 2D
// float64 arrays (copied both ways; these are experiment-scale payloads).

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cps/experiments.hpp"
#include "cps/image.hpp"
#include "cps/linops.hpp"
#include "cps/metrics.hpp"
#include "cps/mimo.hpp"
#include "cps/penalties.hpp"
#include "cps/solver.hpp"

namespace py = pybind11;
using namespace cps;

namespace {

using Array1D = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array1D& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1D array");
  const double* p = a.data();
  return std::vector<double>(p, p + a.size());
}

// Shape passed as an explicit vector: the single-element braced form
// array_t({n}) builds a stride-0 array on some pybind11 releases.
py::array_t<double> from_vec(const std::vector<double>& v) {
  return py::array_t<double>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())},
                             v.data());
}

ImageGrid to_grid(const Array1D& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2D array");
  ImageGrid img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  const double* p = a.data();
  std::copy(p, p + a.size(), img.pixels.begin());
  return img;
}

py::array_t<double> from_grid(const ImageGrid& img) {
  return py::array_t<double>(
      std::vector<py::ssize_t>{static_cast<py::ssize_t>(img.rows),
                               static_cast<py::ssize_t>(img.cols)},
      img.pixels.data());
}

PenaltySpec penalty_from(const std::string& kind, double scale, int tv_rows, int tv_cols) {
  if (kind == "cauchy") return PenaltySpec::cauchy(scale);
  if (kind == "l1") return PenaltySpec::l1(scale);
  if (kind == "hard") return PenaltySpec::hard(scale);
  if (kind == "tv") return PenaltySpec::tv(scale, 100, 1e-6, tv_rows, tv_cols);
  throw std::invalid_argument("penalty must be cauchy, l1, tv, or hard");
}

RestoreTask task_from(const std::string& task) {
  if (task == "denoise") return RestoreTask::Denoise;
  if (task == "deblur") return RestoreTask::Deblur;
  throw std::invalid_argument("task must be denoise or deblur");
}

Constellation constellation_from(const std::string& name) {
  if (name == "qpsk") return Constellation::qpsk();
  if (name == "16qam") return Constellation::qam16();
  throw std::invalid_argument("constellation must be qpsk or 16qam");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cauchy proximal splitting: penalties, operators, solver, experiments";

  // -- proximal operators ---------------------------------------------------
  m.def("prox_cauchy", py::vectorize([](double x, double gamma, double mu) {
          return prox_cauchy(x, gamma, mu);
        }),
        py::arg("x"), py::arg("gamma"), py::arg("mu"),
        "Exact proximal operator of log((gamma^2 + x^2)/gamma), elementwise.");
  m.def("prox_l1", py::vectorize(&prox_l1), py::arg("x"), py::arg("t"),
        "Soft threshold, elementwise.");
  m.def("prox_hard", py::vectorize(&prox_hard), py::arg("x"), py::arg("t"),
        "Hard threshold, elementwise (|x| == t keeps x).");
  m.def("prox_tv_1d",
        [](const Array1D& x, double lam, int iters, double tol) {
          return from_vec(prox_tv_1d(to_vec(x), lam, iters, tol));
        },
        py::arg("x"), py::arg("lam"), py::arg("inner_iters") = 100,
        py::arg("inner_tol") = 1e-6, "1D total-variation prox (dual iteration).");
  m.def("prox_tv_2d",
        [](const Array1D& img, double lam, int iters, double tol) {
          return from_grid(prox_tv_2d(to_grid(img), lam, iters, tol));
        },
        py::arg("img"), py::arg("lam"), py::arg("inner_iters") = 100,
        py::arg("inner_tol") = 1e-6, "2D isotropic total-variation prox.");
  m.def("cauchy_neglog", py::vectorize(&cauchy_neglog), py::arg("x"), py::arg("gamma"),
        "Penalty value log((gamma^2 + x^2)/gamma), elementwise.");
  m.def("gamma_min_step", &gamma_min_step, py::arg("mu"),
        "Smallest dispersion keeping the prox subproblem convex: sqrt(mu)/2.");
  m.def("gamma_min_frame", &gamma_min_frame, py::arg("sigma"), py::arg("r"),
        "Smallest dispersion keeping the tight-frame cost convex: sigma/(2 sqrt(r)).");
  m.def("step_size_policy", &step_size_policy, py::arg("lipschitz"),
        py::arg("factor") = 1.5, "Step size factor/L; factor must lie in (0, 2).");
  m.def("gamma_policy",
        [](double mu, double multiplier) {
          const GammaChoice g = gamma_policy(mu, multiplier);
          return py::make_tuple(g.gamma, g.clamped);
        },
        py::arg("mu"), py::arg("multiplier") = 10.0,
        "(gamma, clamped): multiplier * sqrt(mu)/2 with the multiplier clamped to [1, 50].");

  // -- linear operators -----------------------------------------------------
  py::class_<LinearOperator>(m, "LinearOperator")
      .def("apply", [](const LinearOperator& op, const Array1D& x) {
        return from_vec(op.apply(to_vec(x)));
      })
      .def("adjoint", [](const LinearOperator& op, const Array1D& y) {
        return from_vec(op.adjoint(to_vec(y)));
      })
      .def_property_readonly("domain_dim", &LinearOperator::domain_dim)
      .def_property_readonly("range_dim", &LinearOperator::range_dim)
      .def_property_readonly("frame_constant", [](const LinearOperator& op) {
        return op.frame_constant();  // None when no tight-frame constant is known
      });
  m.def("make_identity", &make_identity, py::arg("n"));
  m.def("make_dense", &make_dense, py::arg("a"),
        "Dense operator; tight frames (A^T A = rI) are detected automatically.");
  m.def("make_partial_idft", &make_partial_idft, py::arg("m"), py::arg("n"),
        "[Re x; Im x] of a length-n spectrum to the first m inverse-DFT samples.");
  m.def("make_conv2d",
        [](int rows, int cols, int psf_side, double psf_sigma) {
          return make_conv2d(gaussian_psf(psf_side, psf_sigma), rows, cols);
        },
        py::arg("rows"), py::arg("cols"), py::arg("psf_side") = 5,
        py::arg("psf_sigma") = 1.0,
        "Circular 2D convolution with a normalized Gaussian PSF.");
  m.def("opnorm_sq",
        [](const LinearOperator& op, double tol, int max_iter) {
          const OpnormEstimate est = opnorm_sq(op, tol, max_iter);
          return py::make_tuple(est.value, est.converged, est.iterations);
        },
        py::arg("op"), py::arg("tol") = 1e-6, py::arg("max_iter") = 200,
        "(value, converged, iterations): largest eigenvalue of A^T A by power iteration.");
  m.def("dot_test", &dot_test, py::arg("op"), py::arg("trials") = 10,
        py::arg("seed") = 1, "Worst adjoint-consistency residual on random pairs.");

  // -- forward-backward solver ----------------------------------------------
  m.def("fb_solve",
        [](const Array1D& y, const LinearOperator& op, const std::string& penalty,
           double scale, double mu, double eps, int max_iter, double fidelity_weight,
           std::optional<double> lipschitz, bool record_history, int tv_rows,
           int tv_cols) {
          FBConfig cfg;
          cfg.mu = mu;
          cfg.eps = eps;
          cfg.max_iter = max_iter;
          cfg.fidelity_weight = fidelity_weight;
          cfg.lipschitz = lipschitz;
          cfg.record_history = record_history;
          const FBResult r =
              fb_solve(to_vec(y), op, penalty_from(penalty, scale, tv_rows, tv_cols), cfg);
          py::dict out;
          out["x_hat"] = from_vec(r.x_hat);
          out["iterations"] = r.iterations;
          out["converged"] = r.converged;
          out["step_warning"] = r.step_warning;
          out["rel_changes"] = from_vec(r.rel_changes);
          out["costs"] = from_vec(r.costs);
          return out;
        },
        py::arg("y"), py::arg("op"), py::arg("penalty"), py::arg("scale"),
        py::arg("mu"), py::arg("eps") = 1e-3, py::arg("max_iter") = 500,
        py::arg("fidelity_weight") = 1.0, py::arg("lipschitz") = py::none(),
        py::arg("record_history") = false, py::arg("tv_rows") = 0,
        py::arg("tv_cols") = 0,
        "Forward-backward splitting for w/2 |y - Ax|^2 + penalty(x).");

  // -- metrics and signals --------------------------------------------------
  m.def("rmse", [](const Array1D& a, const Array1D& b) { return rmse(to_vec(a), to_vec(b)); },
        py::arg("a"), py::arg("b"));
  m.def("mae", [](const Array1D& a, const Array1D& b) { return mae(to_vec(a), to_vec(b)); },
        py::arg("a"), py::arg("b"));
  m.def("psnr", [](const Array1D& ref, const Array1D& est) {
          return psnr(to_grid(ref), to_grid(est));
        },
        py::arg("ref"), py::arg("est"), "Peak 255 unless the reference says otherwise.");
  m.def("ssim", [](const Array1D& ref, const Array1D& est) {
          return ssim(to_grid(ref), to_grid(est));
        },
        py::arg("ref"), py::arg("est"), "Mean local SSIM over interior 11x11 windows.");
  m.def("heavy_sine", [](int n) { return from_vec(heavy_sine(n)); }, py::arg("n"));
  m.def("add_awgn",
        [](const Array1D& s, double snr_db, std::uint64_t seed) {
          const NoisySignal noisy = add_awgn(to_vec(s), snr_db, seed);
          return py::make_tuple(from_vec(noisy.samples), noisy.sigma);
        },
        py::arg("s"), py::arg("snr_db"), py::arg("seed"),
        "(noisy, sigma): white Gaussian noise at the requested SNR.");
  m.def("phantom", [](int rows, int cols) { return from_grid(phantom(rows, cols)); },
        py::arg("rows") = 256, py::arg("cols") = 256,
        "Deterministic piecewise-constant ellipse phantom in [0, 255].");

  // -- experiment harnesses -------------------------------------------------
  m.def("run_denoise_1d",
        [](int mm, int n, double snr_db, int trials, const std::string& penalty,
           double scale, std::uint64_t seed, int threads, double step_factor,
           double eps, int max_iter) {
          Denoise1DParams p;
          p.m = mm;
          p.n = n;
          p.snr_db = snr_db;
          p.trials = trials;
          p.seed = seed;
          p.threads = threads;
          p.step_factor = step_factor;
          p.eps = eps;
          p.max_iter = max_iter;
          const Denoise1DOutput o = run_denoise_1d(p, penalty_from(penalty, scale, 0, 0));
          py::dict out;
          out["trial_rmse"] = from_vec(o.trial_rmse);
          out["trial_mae"] = from_vec(o.trial_mae);
          out["mean_rmse"] = o.mean_rmse;
          out["mean_mae"] = o.mean_mae;
          out["sigma"] = o.sigma;
          out["mu"] = o.mu;
          out["example_clean"] = from_vec(o.example_clean);
          out["example_noisy"] = from_vec(o.example_noisy);
          out["example_estimate"] = from_vec(o.example_estimate);
          return out;
        },
        py::arg("m"), py::arg("n"), py::arg("snr_db"), py::arg("trials"),
        py::arg("penalty"), py::arg("scale"), py::arg("seed") = 7,
        py::arg("threads") = 1, py::arg("step_factor") = 1.5, py::arg("eps") = 1e-3,
        py::arg("max_iter") = 500,
        "Paired 1D frequency-domain denoising trials through the inverse-DFT frame.");
  m.def("denoise_1d_mu",
        [](int mm, int n) {
          Denoise1DParams p;
          p.m = mm;
          p.n = n;
          return denoise_1d_setup(p).mu;
        },
        py::arg("m"), py::arg("n"), "Step size the 1D harness will use.");
  m.def("run_restore_2d",
        [](const Array1D& img, const std::string& task, const std::string& penalty,
           double scale, double snr_db, double bsnr_db, std::uint64_t seed,
           int psf_side, double psf_sigma, double step_factor, double eps,
           int max_iter) {
          Restore2DParams p;
          p.task = task_from(task);
          p.snr_db = snr_db;
          p.bsnr_db = bsnr_db;
          p.seed = seed;
          p.psf_side = psf_side;
          p.psf_sigma = psf_sigma;
          p.step_factor = step_factor;
          p.eps = eps;
          p.max_iter = max_iter;
          const Restore2DResult r =
              run_restore_2d(to_grid(img), p, penalty_from(penalty, scale, 0, 0));
          py::dict out;
          out["estimate"] = from_grid(r.estimate);
          out["degraded"] = from_grid(r.degraded);
          out["psnr_est"] = r.psnr_est;
          out["rmse_est"] = r.rmse_est;
          out["ssim_est"] = r.ssim_est;
          out["psnr_degraded"] = r.psnr_degraded;
          out["rmse_degraded"] = r.rmse_degraded;
          out["ssim_degraded"] = r.ssim_degraded;
          out["sigma"] = r.sigma;
          out["mu"] = r.mu;
          out["iterations"] = r.iterations;
          out["converged"] = r.converged;
          return out;
        },
        py::arg("img"), py::arg("task"), py::arg("penalty"), py::arg("scale"),
        py::arg("snr_db") = 20.0, py::arg("bsnr_db") = 40.0, py::arg("seed") = 7,
        py::arg("psf_side") = 5, py::arg("psf_sigma") = 1.0,
        py::arg("step_factor") = 1.5, py::arg("eps") = 1e-3, py::arg("max_iter") = 250,
        "2D denoise/deblur with the MAP-weighted data term; metrics for both "
        "the degraded input and the estimate.");
  m.def("restore_2d_mu",
        [](const Array1D& img, const std::string& task, double snr_db, double bsnr_db,
           int psf_side, double psf_sigma) {
          Restore2DParams p;
          p.task = task_from(task);
          p.snr_db = snr_db;
          p.bsnr_db = bsnr_db;
          p.psf_side = psf_side;
          p.psf_sigma = psf_sigma;
          return restore_2d_setup(to_grid(img), p).mu;
        },
        py::arg("img"), py::arg("task"), py::arg("snr_db") = 20.0,
        py::arg("bsnr_db") = 40.0, py::arg("psf_side") = 5, py::arg("psf_sigma") = 1.0,
        "Step size the 2D harness will use (for turning multipliers into gammas).");
  m.def("sweep_gamma_1d",
        [](int mm, int n, double snr_db, const Array1D& gammas, std::uint64_t seed,
           int threads) {
          Denoise1DParams p;
          p.m = mm;
          p.n = n;
          p.snr_db = snr_db;
          p.seed = seed;
          p.threads = threads;
          const SweepResult s = sweep_gamma_1d(p, to_vec(gammas));
          py::dict out;
          out["gammas"] = from_vec(s.gammas);
          out["rmse"] = from_vec(s.rmse);
          out["critical_frame"] = s.critical_frame;
          out["critical_step"] = s.critical_step;
          return out;
        },
        py::arg("m"), py::arg("n"), py::arg("snr_db"), py::arg("gammas"),
        py::arg("seed") = 7, py::arg("threads") = 1);
  m.def("sweep_gamma_2d",
        [](const Array1D& img, const std::string& task, const Array1D& gammas,
           double snr_db, double bsnr_db, std::uint64_t seed, int threads) {
          Restore2DParams p;
          p.task = task_from(task);
          p.snr_db = snr_db;
          p.bsnr_db = bsnr_db;
          p.seed = seed;
          p.threads = threads;
          const SweepResult s = sweep_gamma_2d(to_grid(img), p, to_vec(gammas));
          py::dict out;
          out["gammas"] = from_vec(s.gammas);
          out["rmse"] = from_vec(s.rmse);
          out["psnr"] = from_vec(s.psnr);
          out["critical_frame"] = s.critical_frame;
          out["critical_step"] = s.critical_step;
          return out;
        },
        py::arg("img"), py::arg("task"), py::arg("gammas"), py::arg("snr_db") = 20.0,
        py::arg("bsnr_db") = 40.0, py::arg("seed") = 7, py::arg("threads") = 1);

  // -- MIMO detection -------------------------------------------------------
  m.def("run_ber_curve",
        [](int n_tx, int n_rx, const std::string& constellation,
           const std::optional<Array1D>& snr_grid_db, int n_symbols, int n_trials,
           std::uint64_t seed, int threads, double gamma_multiplier) {
          MimoScenario sc;
          sc.n_tx = n_tx;
          sc.n_rx = n_rx;
          sc.constellation = constellation_from(constellation);
          if (snr_grid_db) sc.snr_grid_db = to_vec(*snr_grid_db);
          sc.n_symbols = n_symbols;
          sc.n_trials = n_trials;
          sc.seed = seed;
          sc.threads = threads;
          sc.recovery.gamma_multiplier = gamma_multiplier;
          const RecoveryResult r = run_ber_curve(sc);
          py::dict out;
          out["snr_db"] = from_vec(r.snr_db);
          out["ber_zf"] = from_vec(r.ber_zf);
          out["ber_mmse"] = from_vec(r.ber_mmse);
          out["ber_cauchy"] = from_vec(r.ber_cauchy);
          out["symbols_counted"] = r.symbols_counted;
          return out;
        },
        py::arg("n_tx") = 16, py::arg("n_rx") = 16, py::arg("constellation") = "qpsk",
        py::arg("snr_grid_db") = py::none(), py::arg("n_symbols") = 10000,
        py::arg("n_trials") = 10, py::arg("seed") = 7, py::arg("threads") = 1,
        py::arg("gamma_multiplier") = 30.0,
        "ZF / MMSE / Cauchy-recovery bit error rates over an SNR grid "
        "(per-receive-antenna convention n_tx * Es / sigma_v^2).");
}
