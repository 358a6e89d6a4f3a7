#pragma once

#include <span>
#include <vector>

#include "cps/image.hpp"

namespace cps {

// Cauchy penalty h(x) = log((g^2 + x^2)/g), the negative log of a Cauchy
// density with dispersion g. Non-convex: h''(x) < 0 for |x| > g.
struct CauchyPenalty {
  double gamma;
  explicit CauchyPenalty(double g);
};

// One proximal evaluation point: argument x and step size mu.
struct ProxQuery {
  double x;
  double mu;
  ProxQuery(double x_, double mu_);
};

double cauchy_neglog(double x, double gamma);

struct CauchyDerivs {
  double first;   // 2x / (g^2 + x^2)
  double second;  // (2g^2 - 2x^2) / (x^4 + 2g^2 x^2 + g^4)
};
CauchyDerivs cauchy_derivatives(double x, double gamma);

// Objective minimized by the Cauchy prox: (x-u)^2/(2mu) + h(u).
double prox_objective(double u, const ProxQuery& q, const CauchyPenalty& p);

// Closed-form Cauchy proximal operator. The stationarity condition is the
// cubic u^3 - x u^2 + (g^2 + 2mu) u - x g^2 = 0; the single real root is
// taken from the depressed-cubic radical formula, and when three real
// roots exist (possible only for g < sqrt(mu)/2) they are enumerated
// trigonometrically and the objective decides, ties going to smaller |u|.
// The result always satisfies |z| <= |x| with sign(z) in {0, sign(x)}.
double prox_cauchy(const ProxQuery& q, const CauchyPenalty& p);
double prox_cauchy(double x, double gamma, double mu);

std::vector<double> prox_cauchy_vec(std::span<const double> xs, double gamma, double mu);

// Soft threshold: sign(x) * max(|x| - t, 0).
double prox_l1(double x, double t);

// Hard threshold; the boundary |x| == t keeps x.
double prox_hard(double x, double t);

// Discrete total variation, forward differences with Neumann boundary.
// 2D uses the isotropic per-pixel norm.
double tv_1d(std::span<const double> xs);
double tv_2d(const ImageGrid& img);

// TV proximal operators via the dual projection iteration (fixed dual step
// 1/4 in 1D, 1/8 in 2D). Stops when the max dual update falls below
// inner_tol or after inner_iters sweeps. Output mean equals input mean.
std::vector<double> prox_tv_1d(std::span<const double> xs, double lambda,
                               int inner_iters = 100, double inner_tol = 1e-6);
ImageGrid prox_tv_2d(const ImageGrid& img, double lambda,
                     int inner_iters = 100, double inner_tol = 1e-6);

// Smallest dispersion keeping the full cost convex for a tight frame with
// constant r and noise level sigma: sigma / (2 sqrt(r)).
double gamma_min_frame(double sigma, double r);

// Smallest dispersion keeping the prox subproblem convex for step mu:
// sqrt(mu) / 2.
double gamma_min_step(double mu);

// Tagged choice of regularizer for the generic forward-backward solver.
struct PenaltySpec {
  enum class Kind { Cauchy, L1, Tv, Hard };

  Kind kind = Kind::Cauchy;
  double scale = 1.0;      // gamma for Cauchy, lambda otherwise
  int tv_inner_iters = 100;
  double tv_inner_tol = 1e-6;
  int tv_rows = 0;  // 0,0 -> 1D TV on the flat vector
  int tv_cols = 0;

  static PenaltySpec cauchy(double gamma);
  static PenaltySpec l1(double lambda);
  static PenaltySpec tv(double lambda, int inner_iters = 100, double inner_tol = 1e-6,
                        int rows = 0, int cols = 0);
  static PenaltySpec hard(double lambda);

  // Penalty value at x (sum of per-entry terms, or lambda * TV).
  double value(std::span<const double> x) const;
  // Proximal step with effective step size mu.
  std::vector<double> prox(std::span<const double> u, double mu) const;
};

}  // namespace cps
