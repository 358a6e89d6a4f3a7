#include "cps/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cps {

CauchyPenalty::CauchyPenalty(double g) : gamma(g) {
  if (!std::isfinite(g) || g <= 0.0)
    throw std::invalid_argument("CauchyPenalty: gamma must be positive");
}

ProxQuery::ProxQuery(double x_, double mu_) : x(x_), mu(mu_) {
  if (!std::isfinite(mu_) || mu_ <= 0.0)
    throw std::invalid_argument("ProxQuery: mu must be positive");
}

double cauchy_neglog(double x, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("cauchy_neglog: gamma must be positive");
  const double g2 = gamma * gamma;
  return std::log(g2 + x * x) - std::log(gamma);
}

CauchyDerivs cauchy_derivatives(double x, double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("cauchy_derivatives: gamma must be positive");
  const double g2 = gamma * gamma;
  const double d = g2 + x * x;
  return {2.0 * x / d, 2.0 * (g2 - x * x) / (d * d)};
}

double prox_objective(double u, const ProxQuery& q, const CauchyPenalty& p) {
  const double r = q.x - u;
  return r * r / (2.0 * q.mu) + cauchy_neglog(u, p.gamma);
}

namespace {

// Cubic residual and derivative for u^3 - x u^2 + b u - x g^2.
inline double cubic_value(double u, double x, double b, double c) {
  return ((u - x) * u + b) * u - c;
}
inline double cubic_slope(double u, double x, double b) {
  return (3.0 * u - 2.0 * x) * u + b;
}

// A couple of Newton steps to tighten a Cardano root. The radical formula
// loses digits when the root is much smaller than the shifted components;
// polishing against the original cubic restores full precision.
inline double polish_root(double u, double x, double b, double c) {
  for (int k = 0; k < 2; ++k) {
    const double d = cubic_slope(u, x, b);
    if (d == 0.0) break;
    u -= cubic_value(u, x, b, c) / d;
  }
  return u;
}

// Stationary points of the prox objective for x > 0: real roots of
// u^3 - x u^2 + (g^2 + 2mu) u - x g^2 = 0. Returns 1 or 3 roots.
int stationary_points(double x, double gamma, double mu, double out[3]) {
  const double b = gamma * gamma + 2.0 * mu;
  const double c = x * gamma * gamma;
  // depressed form v^3 + P v + Q = 0 with u = v + x/3
  const double P = b - x * x / 3.0;
  const double Q = x * b / 3.0 - c - 2.0 * x * x * x / 27.0;
  const double disc = (Q / 2.0) * (Q / 2.0) + (P / 3.0) * (P / 3.0) * (P / 3.0);

  if (disc >= 0.0) {
    const double sd = std::sqrt(disc);
    // Pick the cube-root argument that adds like signs, the other factor
    // follows from the product of the pair being -P/3.
    const double w1 = (Q <= 0.0) ? std::cbrt(-Q / 2.0 + sd) : std::cbrt(-Q / 2.0 - sd);
    const double w2 = (w1 != 0.0) ? -P / (3.0 * w1) : 0.0;
    out[0] = polish_root(w1 + w2 + x / 3.0, x, b, c);
    return 1;
  }

  // Three real roots (P < 0 here).
  const double m = 2.0 * std::sqrt(-P / 3.0);
  const double arg = std::clamp(3.0 * Q / (2.0 * P) * std::sqrt(-3.0 / P), -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  for (int k = 0; k < 3; ++k) {
    const double v = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
    out[k] = polish_root(v + x / 3.0, x, b, c);
  }
  return 3;
}

}  // namespace

double prox_cauchy(const ProxQuery& q, const CauchyPenalty& p) {
  if (!std::isfinite(q.x)) throw std::invalid_argument("prox_cauchy: non-finite input");
  const double a = std::fabs(q.x);
  if (a < 1e-300) return 0.0;

  double roots[3];
  const int n = stationary_points(a, p.gamma, q.mu, roots);

  double best = roots[0];
  if (n == 3) {
    const ProxQuery qa(a, q.mu);
    double best_obj = prox_objective(std::clamp(best, 0.0, a), qa, p);
    for (int k = 1; k < 3; ++k) {
      const double z = std::clamp(roots[k], 0.0, a);
      const double obj = prox_objective(z, qa, p);
      if (obj < best_obj || (obj == best_obj && std::fabs(z) < std::fabs(best))) {
        best = z;
        best_obj = obj;
      }
    }
  }
  const double z = std::clamp(best, 0.0, a);
  return q.x < 0.0 ? -z : z;
}

double prox_cauchy(double x, double gamma, double mu) {
  return prox_cauchy(ProxQuery(x, mu), CauchyPenalty(gamma));
}

std::vector<double> prox_cauchy_vec(std::span<const double> xs, double gamma, double mu) {
  const CauchyPenalty pen(gamma);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    out[i] = prox_cauchy(ProxQuery(xs[i], mu), pen);
  return out;
}

double prox_l1(double x, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("prox_l1: threshold must be positive");
  const double m = std::fabs(x) - t;
  return m > 0.0 ? std::copysign(m, x) : 0.0;
}

double prox_hard(double x, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("prox_hard: threshold must be positive");
  return std::fabs(x) >= t ? x : 0.0;
}

double tv_1d(std::span<const double> xs) {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) tv += std::fabs(xs[i + 1] - xs[i]);
  return tv;
}

double tv_2d(const ImageGrid& img) {
  double tv = 0.0;
  for (int r = 0; r < img.rows; ++r)
    for (int c = 0; c < img.cols; ++c) {
      const double dx = (r + 1 < img.rows) ? img.at(r + 1, c) - img.at(r, c) : 0.0;
      const double dy = (c + 1 < img.cols) ? img.at(r, c + 1) - img.at(r, c) : 0.0;
      tv += std::sqrt(dx * dx + dy * dy);
    }
  return tv;
}

namespace {
void check_tv_params(double lambda, int inner_iters) {
  if (!(lambda > 0.0)) throw std::invalid_argument("prox_tv: lambda must be positive");
  if (inner_iters < 1) throw std::invalid_argument("prox_tv: inner_iters must be >= 1");
}
}  // namespace

std::vector<double> prox_tv_1d(std::span<const double> xs, double lambda,
                               int inner_iters, double inner_tol) {
  check_tv_params(lambda, inner_iters);
  const std::size_t n = xs.size();
  std::vector<double> out(xs.begin(), xs.end());
  if (n < 2) return out;

  const double tau = 0.25;
  std::vector<double> p(n - 1, 0.0), w(n, 0.0);
  for (int it = 0; it < inner_iters; ++it) {
    // w = div(p) - f/lambda
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      if (i < n - 1) d += p[i];
      if (i > 0) d -= p[i - 1];
      w[i] = d - xs[i] / lambda;
    }
    double max_update = 0.0;
    for (std::size_t i = 0; i < n - 1; ++i) {
      const double g = w[i + 1] - w[i];
      const double next = (p[i] + tau * g) / (1.0 + tau * std::fabs(g));
      max_update = std::max(max_update, std::fabs(next - p[i]));
      p[i] = next;
    }
    if (max_update <= inner_tol) break;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    if (i < n - 1) d += p[i];
    if (i > 0) d -= p[i - 1];
    out[i] = xs[i] - lambda * d;
  }
  return out;
}

ImageGrid prox_tv_2d(const ImageGrid& img, double lambda, int inner_iters, double inner_tol) {
  check_tv_params(lambda, inner_iters);
  const int rows = img.rows, cols = img.cols;
  const double tau = 0.125;
  ImageGrid px(rows, cols), py(rows, cols), w(rows, cols);

  auto divergence = [&](int r, int c) {
    double d = 0.0;
    if (r < rows - 1) d += px.at(r, c);
    if (r > 0) d -= px.at(r - 1, c);
    if (c < cols - 1) d += py.at(r, c);
    if (c > 0) d -= py.at(r, c - 1);
    return d;
  };

  for (int it = 0; it < inner_iters; ++it) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        w.at(r, c) = divergence(r, c) - img.at(r, c) / lambda;

    double max_update = 0.0;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const double gx = (r < rows - 1) ? w.at(r + 1, c) - w.at(r, c) : 0.0;
        const double gy = (c < cols - 1) ? w.at(r, c + 1) - w.at(r, c) : 0.0;
        const double norm = std::sqrt(gx * gx + gy * gy);
        const double nx = (px.at(r, c) + tau * gx) / (1.0 + tau * norm);
        const double ny = (py.at(r, c) + tau * gy) / (1.0 + tau * norm);
        max_update = std::max({max_update, std::fabs(nx - px.at(r, c)),
                               std::fabs(ny - py.at(r, c))});
        px.at(r, c) = nx;
        py.at(r, c) = ny;
      }
    if (max_update <= inner_tol) break;
  }

  ImageGrid out(rows, cols);
  out.peak = img.peak;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.at(r, c) = img.at(r, c) - lambda * divergence(r, c);
  return out;
}

double gamma_min_frame(double sigma, double r) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("gamma_min_frame: sigma must be >= 0");
  if (!(r > 0.0)) throw std::invalid_argument("gamma_min_frame: r must be positive");
  return sigma / (2.0 * std::sqrt(r));
}

double gamma_min_step(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("gamma_min_step: mu must be positive");
  return std::sqrt(mu) / 2.0;
}

PenaltySpec PenaltySpec::cauchy(double gamma) {
  CauchyPenalty check(gamma);
  PenaltySpec s;
  s.kind = Kind::Cauchy;
  s.scale = check.gamma;
  return s;
}

PenaltySpec PenaltySpec::l1(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("PenaltySpec: lambda must be positive");
  PenaltySpec s;
  s.kind = Kind::L1;
  s.scale = lambda;
  return s;
}

PenaltySpec PenaltySpec::tv(double lambda, int inner_iters, double inner_tol, int rows, int cols) {
  check_tv_params(lambda, inner_iters);
  if ((rows == 0) != (cols == 0) || rows < 0 || cols < 0)
    throw std::invalid_argument("PenaltySpec: tv grid shape must be both zero or both positive");
  PenaltySpec s;
  s.kind = Kind::Tv;
  s.scale = lambda;
  s.tv_inner_iters = inner_iters;
  s.tv_inner_tol = inner_tol;
  s.tv_rows = rows;
  s.tv_cols = cols;
  return s;
}

PenaltySpec PenaltySpec::hard(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("PenaltySpec: lambda must be positive");
  PenaltySpec s;
  s.kind = Kind::Hard;
  s.scale = lambda;
  return s;
}

double PenaltySpec::value(std::span<const double> x) const {
  switch (kind) {
    case Kind::Cauchy: {
      double sum = 0.0;
      for (double xi : x) sum += cauchy_neglog(xi, scale);
      return sum;
    }
    case Kind::L1: {
      double sum = 0.0;
      for (double xi : x) sum += std::fabs(xi);
      return scale * sum;
    }
    case Kind::Tv: {
      if (tv_rows == 0) return scale * tv_1d(x);
      if (x.size() != static_cast<std::size_t>(tv_rows) * tv_cols)
        throw std::invalid_argument("PenaltySpec: vector does not match tv grid shape");
      ImageGrid g(tv_rows, tv_cols);
      std::copy(x.begin(), x.end(), g.pixels.begin());
      return scale * tv_2d(g);
    }
    case Kind::Hard: {
      double nnz = 0.0;
      for (double xi : x)
        if (xi != 0.0) nnz += 1.0;
      return scale * nnz;
    }
  }
  return 0.0;
}

std::vector<double> PenaltySpec::prox(std::span<const double> u, double mu) const {
  switch (kind) {
    case Kind::Cauchy:
      return prox_cauchy_vec(u, scale, mu);
    case Kind::L1: {
      std::vector<double> out(u.size());
      const double t = scale * mu;
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = prox_l1(u[i], t);
      return out;
    }
    case Kind::Tv: {
      if (tv_rows == 0) return prox_tv_1d(u, scale * mu, tv_inner_iters, tv_inner_tol);
      if (u.size() != static_cast<std::size_t>(tv_rows) * tv_cols)
        throw std::invalid_argument("PenaltySpec: vector does not match tv grid shape");
      ImageGrid g(tv_rows, tv_cols);
      std::copy(u.begin(), u.end(), g.pixels.begin());
      return prox_tv_2d(g, scale * mu, tv_inner_iters, tv_inner_tol).pixels;
    }
    case Kind::Hard: {
      std::vector<double> out(u.size());
      const double t = std::sqrt(2.0 * scale * mu);
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = prox_hard(u[i], t);
      return out;
    }
  }
  return {};
}

}  // namespace cps
