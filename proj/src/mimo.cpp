#include "cps/mimo.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "cps/linops.hpp"
#include "cps/parallel.hpp"
#include "cps/penalties.hpp"
#include "cps/solver.hpp"

namespace cps {

Constellation Constellation::qpsk() {
  Constellation c;
  c.kind = Kind::Qpsk;
  c.bits_per_symbol = 2;
  c.points.resize(4);
  const double s = 1.0 / std::sqrt(2.0);
  const std::complex<double> ccw[4] = {{s, s}, {-s, s}, {-s, -s}, {s, -s}};
  for (int k = 0; k < 4; ++k) c.points[k ^ (k >> 1)] = ccw[k];
  return c;
}

Constellation Constellation::qam16() {
  Constellation c;
  c.kind = Kind::Qam16;
  c.bits_per_symbol = 4;
  c.points.resize(16);
  double level[4];
  level[0b00] = -3.0;
  level[0b01] = -1.0;
  level[0b11] = 1.0;
  level[0b10] = 3.0;
  const double s = 1.0 / std::sqrt(10.0);
  for (int label = 0; label < 16; ++label)
    c.points[label] = {level[(label >> 2) & 3] * s, level[label & 3] * s};
  return c;
}

int slice_one(std::complex<double> soft, const Constellation& c) {
  int best = 0;
  double best_d2 = std::norm(soft - c.points[0]);
  for (int label = 1; label < static_cast<int>(c.points.size()); ++label) {
    const double d2 = std::norm(soft - c.points[label]);
    if (d2 < best_d2) {  // strict: ties keep the smaller label
      best = label;
      best_d2 = d2;
    }
  }
  return best;
}

std::vector<int> slice(const Eigen::VectorXcd& soft, const Constellation& c) {
  std::vector<int> out(soft.size());
  for (Eigen::Index i = 0; i < soft.size(); ++i) out[i] = slice_one(soft[i], c);
  return out;
}

long long bit_errors(std::span<const int> sent, std::span<const int> detected) {
  if (sent.size() != detected.size())
    throw std::invalid_argument("bit_errors: length mismatch");
  long long errs = 0;
  for (std::size_t i = 0; i < sent.size(); ++i)
    errs += std::popcount(static_cast<unsigned>(sent[i] ^ detected[i]));
  return errs;
}

Eigen::MatrixXcd gen_channel(int m, int n, RandomStream& rng) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_channel: bad shape");
  Eigen::MatrixXcd h(m, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = {s * rng.normal(), s * rng.normal()};
  return h;
}

Eigen::MatrixXcd gen_channel(int m, int n, std::uint64_t seed) {
  RandomStream rng(seed);
  return gen_channel(m, n, rng);
}

std::vector<int> zf_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                           const Constellation& c) {
  if (y.size() != h.rows()) throw std::invalid_argument("zf_detect: shape mismatch");
  return slice(h.colPivHouseholderQr().solve(y), c);
}

MmseResult mmse_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                       double sigma_v2, const Constellation& c) {
  if (y.size() != h.rows()) throw std::invalid_argument("mmse_detect: shape mismatch");
  if (sigma_v2 < 0.0)
    throw std::invalid_argument("mmse_detect: negative noise variance");
  const Eigen::MatrixXcd gram =
      h.adjoint() * h +
      sigma_v2 * Eigen::MatrixXcd::Identity(h.cols(), h.cols());
  MmseResult out;
  out.soft = gram.ldlt().solve(h.adjoint() * y);
  out.hard = slice(out.soft, c);
  return out;
}

std::vector<int> error_recover_cps(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                                   std::span<const int> s_hard, double sigma_v2,
                                   const Constellation& c, const RecoveryOptions& opts) {
  const int n = static_cast<int>(h.cols());
  const int m = static_cast<int>(h.rows());
  if (y.size() != m || static_cast<int>(s_hard.size()) != n)
    throw std::invalid_argument("error_recover_cps: shape mismatch");

  Eigen::VectorXcd s_points(n);
  for (int i = 0; i < n; ++i) s_points[i] = c.points[s_hard[i]];
  const Eigen::VectorXcd residual = y - h * s_points;

  const double w = sigma_v2 > 0.0 ? 1.0 / sigma_v2 : 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h.adjoint() * h,
                                                      Eigen::EigenvaluesOnly);
  const double lipschitz = w * eig.eigenvalues().maxCoeff();
  const double mu = step_size_policy(lipschitz, opts.step_factor);
  const double gamma = gamma_policy(mu, opts.gamma_multiplier).gamma;

  std::vector<double> target(2 * m);
  for (int i = 0; i < m; ++i) {
    target[i] = residual[i].real();
    target[m + i] = residual[i].imag();
  }

  FBConfig cfg;
  cfg.mu = mu;
  cfg.eps = opts.eps;
  cfg.max_iter = opts.max_iter;
  cfg.fidelity_weight = w;
  cfg.lipschitz = lipschitz;
  const LinearOperator op = make_real_composite(h);
  FBResult res;
  try {
    res = cps_solve(target, op, CauchyPenalty(gamma), cfg);
  } catch (const divergence_error& e) {
    throw divergence_error(e.iteration(), "mimo error recovery");
  }

  Eigen::VectorXcd corrected(n);
  for (int i = 0; i < n; ++i)
    corrected[i] = s_points[i] + std::complex<double>{res.x_hat[i], res.x_hat[n + i]};
  return slice(corrected, c);
}

RecoveryResult run_ber_curve(const MimoScenario& sc) {
  if (sc.n_tx < 1 || sc.n_rx < 1)
    throw std::invalid_argument("run_ber_curve: antenna counts must be positive");
  if (sc.n_symbols < sc.n_tx || sc.n_symbols % sc.n_tx != 0)
    throw std::invalid_argument("run_ber_curve: n_symbols must be a positive multiple of n_tx");
  if (sc.n_trials < 1) throw std::invalid_argument("run_ber_curve: need trials >= 1");
  if (sc.snr_grid_db.empty())
    throw std::invalid_argument("run_ber_curve: empty SNR grid");

  const Constellation& c = sc.constellation;
  const int uses = sc.n_symbols / sc.n_tx;
  const long long bits_per_trial =
      static_cast<long long>(sc.n_symbols) * c.bits_per_symbol;

  RecoveryResult out;
  out.snr_db = sc.snr_grid_db;

  for (std::size_t si = 0; si < sc.snr_grid_db.size(); ++si) {
    const double snr_lin = std::pow(10.0, sc.snr_grid_db[si] / 10.0);
    const double sigma_v2 = static_cast<double>(sc.n_tx) / snr_lin;
    const double sigma_v = std::sqrt(sigma_v2);
    const double noise_s = sigma_v / std::sqrt(2.0);

    std::vector<long long> err_zf(sc.n_trials, 0), err_mmse(sc.n_trials, 0),
        err_cauchy(sc.n_trials, 0);

    parallel_for(sc.n_trials, sc.threads, [&](int t) {
      RandomStream rng(sc.seed,
                       static_cast<std::uint64_t>(si) * sc.n_trials + t);
      const Eigen::MatrixXcd h = gen_channel(sc.n_rx, sc.n_tx, rng);

      std::vector<int> sent(sc.n_tx);
      Eigen::VectorXcd x(sc.n_tx), y(sc.n_rx);
      const int order = static_cast<int>(c.points.size());
      for (int u = 0; u < uses; ++u) {
        for (int i = 0; i < sc.n_tx; ++i) {
          const int label =
              std::min(order - 1, static_cast<int>(rng.uniform() * order));
          sent[i] = label;
          x[i] = c.points[label];
        }
        y = h * x;
        for (int i = 0; i < sc.n_rx; ++i)
          y[i] += std::complex<double>{noise_s * rng.normal(),
                                       noise_s * rng.normal()};

        const std::vector<int> zf = zf_detect(y, h, c);
        const MmseResult mmse = mmse_detect(y, h, sigma_v2, c);
        const std::vector<int> rec =
            error_recover_cps(y, h, mmse.hard, sigma_v2, c, sc.recovery);

        err_zf[t] += bit_errors(sent, zf);
        err_mmse[t] += bit_errors(sent, mmse.hard);
        err_cauchy[t] += bit_errors(sent, rec);
      }
    });

    long long zf = 0, mmse = 0, cauchy = 0;
    for (int t = 0; t < sc.n_trials; ++t) {  // index-order reduction
      zf += err_zf[t];
      mmse += err_mmse[t];
      cauchy += err_cauchy[t];
    }
    const double total_bits =
        static_cast<double>(bits_per_trial) * sc.n_trials;
    out.ber_zf.push_back(zf / total_bits);
    out.ber_mmse.push_back(mmse / total_bits);
    out.ber_cauchy.push_back(cauchy / total_bits);
    out.symbols_counted +=
        static_cast<long long>(sc.n_symbols) * sc.n_trials;
  }
  return out;
}

}  // namespace cps
