#include "cps/linops.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>

#include "cps/fft.hpp"
#include "cps/rng.hpp"

namespace cps {

Psf2D gaussian_psf(int side, double sigma_psf) {
  if (side < 1 || side % 2 == 0)
    throw std::invalid_argument("gaussian_psf: side must be a positive odd number");
  if (!(sigma_psf > 0.0))
    throw std::invalid_argument("gaussian_psf: sigma must be positive");
  Psf2D psf;
  psf.side = side;
  psf.taps.assign(static_cast<std::size_t>(side) * side, 0.0);
  const int c = side / 2;
  double sum = 0.0;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const double di = i - c, dj = j - c;
      const double v = std::exp(-(di * di + dj * dj) / (2.0 * sigma_psf * sigma_psf));
      psf.taps[static_cast<std::size_t>(i) * side + j] = v;
      sum += v;
    }
  for (double& t : psf.taps) t /= sum;
  psf.normalized = true;
  return psf;
}

LinearOperator::LinearOperator(Kind kind, int domain, int range,
                               std::optional<double> frame, VecFn fwd, VecFn adj)
    : kind_(kind), domain_(domain), range_(range), frame_(frame),
      fwd_(std::move(fwd)), adj_(std::move(adj)) {}

std::vector<double> LinearOperator::apply(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(domain_))
    throw std::invalid_argument("LinearOperator::apply: dimension mismatch");
  return fwd_(x);
}

std::vector<double> LinearOperator::adjoint(std::span<const double> y) const {
  if (y.size() != static_cast<std::size_t>(range_))
    throw std::invalid_argument("LinearOperator::adjoint: dimension mismatch");
  return adj_(y);
}

LinearOperator make_identity(int n) {
  if (n < 1) throw std::invalid_argument("make_identity: dimension must be positive");
  auto copy = [](std::span<const double> v) {
    return std::vector<double>(v.begin(), v.end());
  };
  return LinearOperator(LinearOperator::Kind::Identity, n, n, 1.0, copy, copy);
}

namespace {

struct DensePieces {
  int m, n;
  std::function<std::vector<double>(std::span<const double>)> fwd, adj;
};

DensePieces dense_pieces(Eigen::MatrixXd a) {
  if (a.rows() < 1 || a.cols() < 1)
    throw std::invalid_argument("dense operator: matrix must be non-empty");
  auto mat = std::make_shared<const Eigen::MatrixXd>(std::move(a));
  DensePieces p;
  p.m = static_cast<int>(mat->rows());
  p.n = static_cast<int>(mat->cols());
  p.fwd = [mat, n = p.n](std::span<const double> x) {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    Eigen::VectorXd r = (*mat) * xv;
    return std::vector<double>(r.data(), r.data() + r.size());
  };
  p.adj = [mat, m = p.m](std::span<const double> y) {
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), m);
    Eigen::VectorXd r = mat->transpose() * yv;
    return std::vector<double>(r.data(), r.data() + r.size());
  };
  return p;
}

}  // namespace

LinearOperator make_dense(Eigen::MatrixXd a) {
  DensePieces p = dense_pieces(std::move(a));
  LinearOperator op(LinearOperator::Kind::Dense, p.n, p.m, std::nullopt,
                    std::move(p.fwd), std::move(p.adj));
  // Tight-frame detection: columns of a frame with A^T A = rI are orthogonal
  // with squared norm r, so read r off the first diagonal entry of A^T A and
  // accept it if Gaussian probes confirm A^T A v = r v to the advertised
  // tolerance.
  const int n = op.domain_dim();
  std::vector<double> e1(n, 0.0);
  e1[0] = 1.0;
  const double r = op.adjoint(op.apply(e1))[0];
  if (r > 0.0) {
    RandomStream rng(815);
    bool tight = true;
    for (int t = 0; t < 4 && tight; ++t) {
      std::vector<double> v(n);
      double vn = 0.0;
      for (double& vi : v) {
        vi = rng.normal();
        vn += vi * vi;
      }
      vn = std::sqrt(vn);
      const std::vector<double> w = op.adjoint(op.apply(v));
      double resid = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = w[i] - r * v[i];
        resid += d * d;
      }
      tight = std::sqrt(resid) <= 1e-8 * vn;
    }
    if (tight) op.frame_ = r;
  }
  return op;
}

LinearOperator make_partial_idft(int m, int n) {
  if (n < 1 || m < 1 || m > n)
    throw std::invalid_argument("make_partial_idft: need 1 <= m <= n");
  const double root_n = std::sqrt(static_cast<double>(n));
  auto fwd = [m, n, root_n](std::span<const double> x) {
    std::vector<std::complex<double>> buf(n);
    for (int k = 0; k < n; ++k) buf[k] = {x[k], x[n + k]};
    fft::inverse(buf);  // normalized: (1/n) sum c_k e^{+2 pi i mk/n}
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[i] = buf[i].real() * root_n;
    return out;
  };
  auto adj = [m, n, root_n](std::span<const double> y) {
    std::vector<std::complex<double>> buf(n, {0.0, 0.0});
    for (int i = 0; i < m; ++i) buf[i] = {y[i], 0.0};
    fft::forward(buf);  // unnormalized: sum y_m e^{-2 pi i mk/n}
    std::vector<double> out(2 * n);
    for (int k = 0; k < n; ++k) {
      out[k] = buf[k].real() / root_n;
      out[n + k] = buf[k].imag() / root_n;
    }
    return out;
  };
  return LinearOperator(LinearOperator::Kind::PartialIDFT, 2 * n, m, std::nullopt,
                        std::move(fwd), std::move(adj));
}

LinearOperator make_conv2d(const Psf2D& psf, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("make_conv2d: bad grid shape");
  if (psf.side < 1 || psf.side % 2 == 0 ||
      psf.taps.size() != static_cast<std::size_t>(psf.side) * psf.side)
    throw std::invalid_argument("make_conv2d: malformed psf");

  // Embed the kernel with its center tap at (0,0), wrapping negative offsets,
  // then precompute the transfer function once.
  const std::size_t npix = static_cast<std::size_t>(rows) * cols;
  std::vector<std::complex<double>> kernel(npix, {0.0, 0.0});
  const int c = psf.side / 2;
  for (int i = 0; i < psf.side; ++i)
    for (int j = 0; j < psf.side; ++j) {
      const int r = ((i - c) % rows + rows) % rows;
      const int q = ((j - c) % cols + cols) % cols;
      kernel[static_cast<std::size_t>(r) * cols + q] += psf.at(i, j);
    }
  fft::forward_2d(kernel, rows, cols);
  auto otf = std::make_shared<const std::vector<std::complex<double>>>(std::move(kernel));

  auto filter = [otf, rows, cols, npix](std::span<const double> x, bool conjugate) {
    std::vector<std::complex<double>> buf(npix);
    for (std::size_t i = 0; i < npix; ++i) buf[i] = {x[i], 0.0};
    fft::forward_2d(buf, rows, cols);
    for (std::size_t i = 0; i < npix; ++i)
      buf[i] *= conjugate ? std::conj((*otf)[i]) : (*otf)[i];
    fft::inverse_2d(buf, rows, cols);
    std::vector<double> out(npix);
    for (std::size_t i = 0; i < npix; ++i) out[i] = buf[i].real();
    return out;
  };
  auto fwd = [filter](std::span<const double> x) { return filter(x, false); };
  auto adj = [filter](std::span<const double> y) { return filter(y, true); };
  const int dim = static_cast<int>(npix);
  return LinearOperator(LinearOperator::Kind::Conv2D, dim, dim, std::nullopt,
                        std::move(fwd), std::move(adj));
}

double conv_opnorm_sq(const Psf2D& psf, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("conv_opnorm_sq: bad grid shape");
  const int c = psf.side / 2;
  const double two_pi = 2.0 * 3.14159265358979323846;
  double best = 0.0;
  for (int u = 0; u < rows; ++u)
    for (int v = 0; v < cols; ++v) {
      std::complex<double> h{0.0, 0.0};
      for (int i = 0; i < psf.side; ++i)
        for (int j = 0; j < psf.side; ++j) {
          const double phase = -two_pi * (static_cast<double>(u) * (i - c) / rows +
                                          static_cast<double>(v) * (j - c) / cols);
          h += psf.at(i, j) * std::complex<double>{std::cos(phase), std::sin(phase)};
        }
      best = std::max(best, std::norm(h));
    }
  return best;
}

LinearOperator make_real_composite(const Eigen::MatrixXcd& h) {
  if (h.rows() < 1 || h.cols() < 1)
    throw std::invalid_argument("make_real_composite: matrix must be non-empty");
  const auto m = h.rows(), n = h.cols();
  Eigen::MatrixXd b(2 * m, 2 * n);
  b.topLeftCorner(m, n) = h.real();
  b.topRightCorner(m, n) = -h.imag();
  b.bottomLeftCorner(m, n) = h.imag();
  b.bottomRightCorner(m, n) = h.real();
  DensePieces p = dense_pieces(std::move(b));
  return LinearOperator(LinearOperator::Kind::RealComposite, p.n, p.m, std::nullopt,
                        std::move(p.fwd), std::move(p.adj));
}

OpnormEstimate opnorm_sq(const LinearOperator& op, double tol, int max_iter,
                         std::uint64_t seed) {
  if (!(tol > 0.0) || max_iter < 1)
    throw std::invalid_argument("opnorm_sq: bad tolerance or iteration cap");
  const int n = op.domain_dim();
  RandomStream rng(seed);
  std::vector<double> v(n);
  double norm = 0.0;
  for (double& vi : v) {
    vi = 0.5 + rng.uniform();  // all-positive start
    norm += vi * vi;
  }
  norm = std::sqrt(norm);
  for (double& vi : v) vi /= norm;

  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> w = op.adjoint(op.apply(v));
    double rayleigh = 0.0, wnorm = 0.0;
    for (int i = 0; i < n; ++i) {
      rayleigh += v[i] * w[i];
      wnorm += w[i] * w[i];
    }
    wnorm = std::sqrt(wnorm);
    if (wnorm == 0.0) return {0.0, true, it};  // operator annihilates v
    const double prev = lambda;
    lambda = rayleigh;
    for (int i = 0; i < n; ++i) v[i] = w[i] / wnorm;
    if (it > 1 && std::fabs(lambda - prev) <= tol * std::fabs(lambda))
      return {lambda, true, it};
  }
  return {lambda, false, max_iter};
}

double dot_test(const LinearOperator& op, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("dot_test: trials must be >= 1");
  RandomStream rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(op.domain_dim()), y(op.range_dim());
    double xn = 0.0, yn = 0.0;
    for (double& xi : x) {
      xi = rng.normal();
      xn += xi * xi;
    }
    for (double& yi : y) {
      yi = rng.normal();
      yn += yi * yi;
    }
    const std::vector<double> ax = op.apply(x);
    const std::vector<double> aty = op.adjoint(y);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < op.range_dim(); ++i) lhs += ax[i] * y[i];
    for (int i = 0; i < op.domain_dim(); ++i) rhs += x[i] * aty[i];
    const double denom = std::sqrt(xn) * std::sqrt(yn);
    if (denom > 0.0) worst = std::max(worst, std::fabs(lhs - rhs) / denom);
  }
  return worst;
}

double frame_residual(const LinearOperator& op, int trials, std::uint64_t seed) {
  if (!op.frame_constant())
    throw std::invalid_argument("frame_residual: operator has no frame constant");
  if (trials < 1) throw std::invalid_argument("frame_residual: trials must be >= 1");
  const double r = *op.frame_constant();
  RandomStream rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> v(op.domain_dim());
    double vn = 0.0;
    for (double& vi : v) {
      vi = rng.normal();
      vn += vi * vi;
    }
    vn = std::sqrt(vn);
    if (vn == 0.0) continue;
    const std::vector<double> w = op.adjoint(op.apply(v));
    double resid = 0.0;
    for (int i = 0; i < op.domain_dim(); ++i) {
      const double d = w[i] - r * v[i];
      resid += d * d;
    }
    worst = std::max(worst, std::sqrt(resid) / vn);
  }
  return worst;
}

}  // namespace cps
