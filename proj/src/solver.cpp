#include "cps/solver.hpp"

#include <cmath>
#include <limits>

namespace cps {

divergence_error::divergence_error(int iteration, const std::string& context)
    : std::runtime_error("divergence at iteration " + std::to_string(iteration) +
                         (context.empty() ? "" : ": " + context)),
      iteration_(iteration) {}

double cost_eval(std::span<const double> x, std::span<const double> y,
                 const LinearOperator& op, const PenaltySpec& penalty,
                 double fidelity_weight) {
  if (!(fidelity_weight > 0.0))
    throw std::invalid_argument("cost_eval: fidelity weight must be positive");
  const std::vector<double> ax = op.apply(x);
  double fit = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double d = y[i] - ax[i];
    fit += d * d;
  }
  return 0.5 * fidelity_weight * fit + penalty.value(x);
}

namespace {

void validate(std::span<const double> y, const LinearOperator& op, const FBConfig& cfg) {
  if (y.size() != static_cast<std::size_t>(op.range_dim()))
    throw std::invalid_argument("fb_solve: observation length does not match operator range");
  if (!cfg.x0.empty() && cfg.x0.size() != static_cast<std::size_t>(op.domain_dim()))
    throw std::invalid_argument("fb_solve: x0 length does not match operator domain");
  if (!(cfg.mu > 0.0)) throw std::invalid_argument("fb_solve: mu must be positive");
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("fb_solve: eps must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("fb_solve: max_iter must be >= 1");
  if (!(cfg.fidelity_weight > 0.0))
    throw std::invalid_argument("fb_solve: fidelity weight must be positive");
}

}  // namespace

FBResult fb_solve(std::span<const double> y, const LinearOperator& op,
                  const PenaltySpec& penalty, const FBConfig& cfg) {
  validate(y, op, cfg);
  const int n = op.domain_dim();
  const double w = cfg.fidelity_weight;

  FBResult result;
  if (cfg.lipschitz)
    result.step_warning = !(cfg.mu < 2.0 / *cfg.lipschitz);

  std::vector<double> x =
      cfg.x0.empty() ? std::vector<double>(n, 0.0) : cfg.x0;
  if (cfg.record_history)
    result.costs.push_back(cost_eval(x, y, op, penalty, w));

  for (int it = 1; it <= cfg.max_iter; ++it) {
    std::vector<double> r = op.apply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
    const std::vector<double> g = op.adjoint(r);

    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = x[i] - cfg.mu * w * g[i];
    std::vector<double> x_next = penalty.prox(u, cfg.mu);

    for (int i = 0; i < n; ++i)
      if (!std::isfinite(x_next[i]))
        throw divergence_error(it, "non-finite iterate component");

    double diff = 0.0, base = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = x_next[i] - x[i];
      diff += d * d;
      base += x[i] * x[i];
    }
    diff = std::sqrt(diff);
    base = std::sqrt(base);
    const double rel = diff == 0.0 ? 0.0
                       : base == 0.0 ? std::numeric_limits<double>::infinity()
                                     : diff / base;

    x = std::move(x_next);
    result.rel_changes.push_back(rel);
    if (cfg.record_history)
      result.costs.push_back(cost_eval(x, y, op, penalty, w));
    result.iterations = it;
    if (rel <= cfg.eps) {
      result.converged = true;
      break;
    }
  }

  result.x_hat = std::move(x);
  return result;
}

FBResult cps_solve(std::span<const double> y, const LinearOperator& op,
                   const CauchyPenalty& penalty, const FBConfig& cfg) {
  return fb_solve(y, op, PenaltySpec::cauchy(penalty.gamma), cfg);
}

double step_size_policy(double lipschitz, double factor) {
  if (!(lipschitz > 0.0))
    throw std::invalid_argument("step_size_policy: Lipschitz constant must be positive");
  if (!(factor > 0.0) || !(factor < 2.0))
    throw std::invalid_argument("step_size_policy: factor must lie in (0, 2)");
  return factor / lipschitz;
}

GammaChoice gamma_policy(double mu, double multiplier) {
  if (!(mu > 0.0)) throw std::invalid_argument("gamma_policy: mu must be positive");
  GammaChoice choice;
  double m = multiplier;
  if (m < 1.0) {
    m = 1.0;
    choice.clamped = true;
  } else if (m > 50.0) {
    m = 50.0;
    choice.clamped = true;
  }
  choice.gamma = m * std::sqrt(mu) / 2.0;
  return choice;
}

double hessian_check_frame(const LinearOperator& op, double sigma, double gamma,
                           std::span<const double> grid) {
  if (!op.frame_constant())
    throw std::invalid_argument("hessian_check_frame: operator has no frame constant");
  if (!(sigma > 0.0))
    throw std::invalid_argument("hessian_check_frame: sigma must be positive");
  if (grid.empty())
    throw std::invalid_argument("hessian_check_frame: empty grid");
  const double base = *op.frame_constant() / (sigma * sigma);
  double min_curv = std::numeric_limits<double>::infinity();
  for (double u : grid)
    min_curv = std::min(min_curv, base + cauchy_derivatives(u, gamma).second);
  return min_curv;
}

}  // namespace cps
