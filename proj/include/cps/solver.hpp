#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cps/linops.hpp"
#include "cps/penalties.hpp"

namespace cps {

struct FBConfig {
  double mu = 0.1;                   // forward-backward step size
  double eps = 1e-3;                 // relative-change stopping tolerance
  int max_iter = 500;
  double fidelity_weight = 1.0;      // w = 1/sigma^2 scaling of the data term
  std::vector<double> x0;            // empty means all zeros
  bool record_history = false;       // fill FBResult::costs (O(problem) per iter)
  std::optional<double> lipschitz;   // L = w * opnorm_sq; enables the mu < 2/L check
};

struct FBResult {
  std::vector<double> x_hat;
  int iterations = 0;
  bool converged = false;
  bool step_warning = false;         // set when mu falls outside (0, 2/L)
  std::vector<double> rel_changes;   // one entry per iteration
  std::vector<double> costs;         // cost of x0 then each iterate, when recorded
};

// Raised when an iterate turns non-finite; carries the iteration index.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(int iteration, const std::string& context);
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// Objective w/2 * |y - Ax|^2 + penalty(x).
double cost_eval(std::span<const double> x, std::span<const double> y,
                 const LinearOperator& op, const PenaltySpec& penalty,
                 double fidelity_weight);

// Forward-backward splitting: u = x - mu*w*A^T(Ax - y), x <- prox(u, mu),
// stopping when the relative iterate change drops to eps or max_iter is hit.
// A zero change counts as converged even from a zero iterate; a nonzero
// change from a zero iterate counts as infinite (keep going).
FBResult fb_solve(std::span<const double> y, const LinearOperator& op,
                  const PenaltySpec& penalty, const FBConfig& cfg);

// The Cauchy-penalty instantiation (the convergence-guaranteed regime is
// gamma >= sqrt(mu)/2).
FBResult cps_solve(std::span<const double> y, const LinearOperator& op,
                   const CauchyPenalty& penalty, const FBConfig& cfg);

// Step size as a fraction of the stability limit: factor / L, default 1.5
// (the recommended mu = 3/(2L)).
double step_size_policy(double lipschitz, double factor = 1.5);

struct GammaChoice {
  double gamma = 0.0;
  bool clamped = false;  // multiplier fell outside [1, 50] and was clamped
};

// gamma = multiplier * sqrt(mu)/2 with the multiplier clamped to [1, 50],
// the recommended operating interval above the convergence boundary.
GammaChoice gamma_policy(double mu, double multiplier = 10.0);

// Min over the grid of r/sigma^2 + h''(u); nonnegative exactly when the
// tight-frame objective is convex on that grid. Requires a frame constant.
double hessian_check_frame(const LinearOperator& op, double sigma, double gamma,
                           std::span<const double> grid);

}  // namespace cps
