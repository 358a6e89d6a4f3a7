#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "cps/linops.hpp"
#include "cps/penalties.hpp"
#include "cps/rng.hpp"
#include "cps/solver.hpp"

using namespace cps;

namespace {

// golden-section minimizer for smooth 1D objectives on [lo, hi]
template <typename F>
double golden_min(F f, double lo, double hi, int iters = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = lo + (hi - lo) * i / (count - 1);
  return g;
}

}  // namespace

TEST_CASE("denoising with a wide-open penalty returns the observation") {
  RandomStream rng(101);
  std::vector<double> y(12);
  for (double& v : y) v = rng.uniform(-3.0, 3.0);
  const LinearOperator id = make_identity(12);

  FBConfig cfg;
  cfg.mu = 1.0;
  cfg.eps = 1e-10;
  cfg.max_iter = 2000;
  cfg.lipschitz = 1.0;
  const double gamma = 3000.0;  // ~1000x the signal scale: negligible shrinkage
  const FBResult res = cps_solve(y, id, CauchyPenalty(gamma), cfg);

  CHECK(res.converged);
  CHECK_FALSE(res.step_warning);
  CHECK(res.iterations == static_cast<int>(res.rel_changes.size()));
  for (int i = 0; i < 12; ++i) {
    // separable objective: compare against a per-coordinate golden-section min
    const double yi = y[i];
    const double truth = golden_min(
        [yi, gamma](double v) {
          return 0.5 * (v - yi) * (v - yi) + cauchy_neglog(v, gamma);
        },
        std::min(0.0, yi) - 1.0, std::max(0.0, yi) + 1.0);
    CHECK(std::fabs(res.x_hat[i] - truth) <= 0.01 * std::max(1.0, std::fabs(truth)));
    CHECK(std::fabs(res.x_hat[i] - yi) <= 0.01 * std::max(1.0, std::fabs(yi)));
  }
}

TEST_CASE("zero data with zero start converges immediately") {
  const std::vector<double> y(5, 0.0);
  FBConfig cfg;
  cfg.mu = 0.5;
  const FBResult res = fb_solve(y, make_identity(5), PenaltySpec::cauchy(1.0), cfg);
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.rel_changes.size() == 1);
  CHECK(res.rel_changes[0] == 0.0);
  for (double v : res.x_hat) CHECK(v == 0.0);
}

TEST_CASE("first step away from a zero start records an infinite relative change") {
  const std::vector<double> y{4.0, -3.0, 2.0};
  FBConfig cfg;
  cfg.mu = 1.0;
  cfg.eps = 1e-8;
  cfg.max_iter = 50;
  const FBResult res = fb_solve(y, make_identity(3), PenaltySpec::l1(0.5), cfg);
  REQUIRE_FALSE(res.rel_changes.empty());
  CHECK(std::isinf(res.rel_changes.front()));
}

TEST_CASE("identity denoising hits the prox fixed point in one productive step") {
  const std::vector<double> y{4.0, -3.0, 0.2, 0.0};
  const double lambda = 0.5;
  FBConfig cfg;
  cfg.mu = 1.0;
  cfg.eps = 1e-12;
  cfg.max_iter = 50;

  SUBCASE("soft threshold") {
    const FBResult res = fb_solve(y, make_identity(4), PenaltySpec::l1(lambda), cfg);
    CHECK(res.converged);
    CHECK(res.iterations == 2);  // step to prox(y), then a zero-change pass
    for (std::size_t i = 0; i < y.size(); ++i)
      CHECK(res.x_hat[i] == prox_l1(y[i], lambda));
  }

  SUBCASE("total variation") {
    const std::vector<double> sig{0.0, 0.1, 1.2, 1.0, 0.9, -0.3};
    const FBResult res =
        fb_solve(sig, make_identity(6), PenaltySpec::tv(0.3), cfg);
    CHECK(res.converged);
    const std::vector<double> direct = prox_tv_1d(sig, 0.3, 100, 1e-6);
    for (std::size_t i = 0; i < sig.size(); ++i)
      CHECK(res.x_hat[i] == direct[i]);
  }
}

TEST_CASE("basis-pursuit style dense problem reaches the long-run cost") {
  RandomStream rng(211);
  Eigen::MatrixXd a(10, 20);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 20; ++j) a(i, j) = rng.normal() / std::sqrt(10.0);
  const LinearOperator op = make_dense(a);
  std::vector<double> y(10);
  for (double& v : y) v = rng.normal();

  const auto est = opnorm_sq(op, 1e-10, 1000, 5);
  REQUIRE(est.converged);
  const PenaltySpec pen = PenaltySpec::l1(0.05);

  FBConfig cfg;
  cfg.mu = 1.0 / est.value;
  cfg.eps = 1e-12;
  cfg.max_iter = 3000;
  cfg.lipschitz = est.value;
  const FBResult fast = fb_solve(y, op, pen, cfg);
  CHECK(fast.converged);

  cfg.eps = 1e-15;
  cfg.max_iter = 20000;
  const FBResult ref = fb_solve(y, op, pen, cfg);

  const double c_fast = cost_eval(fast.x_hat, y, op, pen, 1.0);
  const double c_ref = cost_eval(ref.x_hat, y, op, pen, 1.0);
  CHECK(std::fabs(c_fast - c_ref) <= 1e-4 * std::max(1.0, std::fabs(c_ref)));

  // fixed-point residual of the accepted solution
  std::vector<double> r = op.apply(fast.x_hat);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
  const std::vector<double> g = op.adjoint(r);
  std::vector<double> u(fast.x_hat.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = fast.x_hat[i] - cfg.mu * g[i];
  const std::vector<double> back = pen.prox(u, cfg.mu);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += (back[i] - fast.x_hat[i]) * (back[i] - fast.x_hat[i]);
    den += fast.x_hat[i] * fast.x_hat[i];
  }
  REQUIRE(den > 0.0);
  CHECK(std::sqrt(num) <= 10 * 1e-12 * std::sqrt(den) + 1e-12);
}

TEST_CASE("cost_eval composes the data term and the penalty") {
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 2, -1, 3, 0;
  const LinearOperator op = make_dense(a);
  const std::vector<double> x{1.0, -2.0, 0.5};
  const std::vector<double> y{0.5, 1.5};
  const double w = 2.5;

  // by hand: Ax = (2, -7); residual (-1.5, 8.5); |r|^2 = 74.5
  const double fit = 0.5 * w * 74.5;
  SUBCASE("l1") {
    const double expect = fit + 0.75 * (1.0 + 2.0 + 0.5);
    CHECK(cost_eval(x, y, op, PenaltySpec::l1(0.75), w) ==
          doctest::Approx(expect).epsilon(1e-14));
  }
  SUBCASE("cauchy") {
    const double g = 1.5;
    const double expect =
        fit + cauchy_neglog(1.0, g) + cauchy_neglog(-2.0, g) + cauchy_neglog(0.5, g);
    CHECK(cost_eval(x, y, op, PenaltySpec::cauchy(g), w) ==
          doctest::Approx(expect).epsilon(1e-14));
  }
  CHECK_THROWS_AS(cost_eval(x, y, op, PenaltySpec::l1(1.0), 0.0), std::invalid_argument);
}

TEST_CASE("cost history is monotone for a safe step in the convex regime") {
  RandomStream rng(307);
  std::vector<double> y(40);
  for (double& v : y) v = rng.uniform(-3.0, 3.0);
  FBConfig cfg;
  cfg.mu = 1.0;  // L = 1 for the identity
  cfg.eps = 1e-11;
  cfg.max_iter = 400;
  cfg.record_history = true;
  cfg.lipschitz = 1.0;
  const double gamma = 1.0;  // well above sqrt(mu)/2: prox subproblem convex
  const FBResult res = cps_solve(y, make_identity(40), CauchyPenalty(gamma), cfg);
  REQUIRE(res.costs.size() == static_cast<std::size_t>(res.iterations) + 1);
  for (std::size_t i = 1; i < res.costs.size(); ++i)
    CHECK(res.costs[i] <= res.costs[i - 1] + 1e-10);
}

TEST_CASE("warm start and cold start agree on the convex problem") {
  RandomStream rng(401);
  Eigen::MatrixXd a(8, 12);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 12; ++j) a(i, j) = rng.normal() / 3.0;
  const LinearOperator op = make_dense(a);
  std::vector<double> y(8);
  for (double& v : y) v = rng.normal();
  const auto est = opnorm_sq(op, 1e-10, 1000, 5);
  REQUIRE(est.converged);
  const PenaltySpec pen = PenaltySpec::l1(0.02);

  FBConfig cfg;
  cfg.mu = 1.0 / est.value;
  cfg.eps = 1e-13;
  cfg.max_iter = 6000;
  const FBResult cold = fb_solve(y, op, pen, cfg);
  cfg.x0 = op.adjoint(y);
  const FBResult warm = fb_solve(y, op, pen, cfg);

  const double cc = cost_eval(cold.x_hat, y, op, pen, 1.0);
  const double cw = cost_eval(warm.x_hat, y, op, pen, 1.0);
  CHECK(std::fabs(cc - cw) <= 1e-6 * std::max(1.0, std::fabs(cc)));
}

TEST_CASE("solver runs are bitwise deterministic and permutation equivariant") {
  RandomStream rng(503);
  std::vector<double> y(16);
  for (double& v : y) v = rng.uniform(-2.0, 2.0);
  FBConfig cfg;
  cfg.mu = 0.8;
  cfg.eps = 1e-9;
  cfg.max_iter = 300;
  const LinearOperator id = make_identity(16);
  const PenaltySpec pen = PenaltySpec::cauchy(0.7);

  const FBResult a = fb_solve(y, id, pen, cfg);
  const FBResult b = fb_solve(y, id, pen, cfg);
  CHECK(a.x_hat == b.x_hat);
  CHECK(a.iterations == b.iterations);

  // reverse the observation: the separable solve must reverse with it
  std::vector<double> rev(y.rbegin(), y.rend());
  const FBResult c = fb_solve(rev, id, pen, cfg);
  for (int i = 0; i < 16; ++i) CHECK(c.x_hat[i] == a.x_hat[15 - i]);
}

TEST_CASE("oversized steps trip the warning flag and can diverge") {
  const std::vector<double> y{0.0};
  Eigen::MatrixXd two(1, 1);
  two << 2.0;
  const LinearOperator op = make_dense(two);  // L = 4

  FBConfig cfg;
  cfg.mu = 10.0;  // far beyond 2/L = 0.5
  cfg.eps = 1e-9;
  cfg.max_iter = 500;
  cfg.lipschitz = 4.0;
  cfg.x0 = {1.0};

  bool threw = false;
  try {
    fb_solve(y, op, PenaltySpec::l1(1e-3), cfg);
  } catch (const divergence_error& e) {
    threw = true;
    CHECK(e.iteration() > 100);
    CHECK(e.iteration() < 400);
  }
  CHECK(threw);

  cfg.mu = 0.5;  // exactly 2/L: still flagged
  cfg.max_iter = 5;
  CHECK(fb_solve(y, op, PenaltySpec::l1(1e-3), cfg).step_warning);
  cfg.mu = 0.49;
  CHECK_FALSE(fb_solve(y, op, PenaltySpec::l1(1e-3), cfg).step_warning);
}

TEST_CASE("config validation") {
  const std::vector<double> y{1.0};
  const LinearOperator id = make_identity(1);
  const PenaltySpec pen = PenaltySpec::l1(1.0);
  FBConfig cfg;
  cfg.mu = 0.0;
  CHECK_THROWS_AS(fb_solve(y, id, pen, cfg), std::invalid_argument);
  cfg.mu = 0.1;
  cfg.eps = 0.0;
  CHECK_THROWS_AS(fb_solve(y, id, pen, cfg), std::invalid_argument);
  cfg.eps = 1e-3;
  cfg.max_iter = 0;
  CHECK_THROWS_AS(fb_solve(y, id, pen, cfg), std::invalid_argument);
  cfg.max_iter = 10;
  cfg.x0 = {1.0, 2.0};
  CHECK_THROWS_AS(fb_solve(y, id, pen, cfg), std::invalid_argument);
  cfg.x0.clear();
  CHECK_THROWS_AS(fb_solve(std::vector<double>{1.0, 2.0}, id, pen, cfg),
                  std::invalid_argument);
}

TEST_CASE("step and dispersion policies") {
  CHECK(step_size_policy(1.0) == 1.5);
  CHECK(step_size_policy(2.0, 1.5) == 0.75);
  CHECK(step_size_policy(1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(step_size_policy(0.0), std::invalid_argument);
  CHECK_THROWS_AS(step_size_policy(1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(step_size_policy(1.0, 0.0), std::invalid_argument);

  CHECK(gamma_policy(1.0, 1.0).gamma == 0.5);
  CHECK_FALSE(gamma_policy(1.0, 1.0).clamped);
  CHECK(gamma_policy(1.0, 50.0).gamma == 25.0);
  CHECK(gamma_policy(0.04, 10.0).gamma == doctest::Approx(1.0).epsilon(1e-14));
  const GammaChoice low = gamma_policy(1.0, 0.5);
  CHECK(low.clamped);
  CHECK(low.gamma == 0.5);
  const GammaChoice high = gamma_policy(1.0, 60.0);
  CHECK(high.clamped);
  CHECK(high.gamma == 25.0);
  CHECK_THROWS_AS(gamma_policy(0.0, 10.0), std::invalid_argument);
}

TEST_CASE("frame curvature certificate") {
  const LinearOperator id = make_identity(4);
  const std::vector<double> grid = linspace(-1.0, 1.0, 100001);

  // boundary gamma = sigma/2: curvature bottoms out at exactly zero
  CHECK(hessian_check_frame(id, 0.2, 0.1, grid) >= -1e-12);
  CHECK(hessian_check_frame(id, 0.2, 0.1, grid) <= 1e-4);
  // below the boundary the objective loses convexity
  CHECK(hessian_check_frame(id, 0.2, 0.05, grid) < -50.0);

  // a scaled identity with frame constant 4: boundary is sigma/(2 sqrt(r))
  const LinearOperator scaled = make_dense(2.0 * Eigen::MatrixXd::Identity(4, 4));
  const std::vector<double> wide = linspace(-3.0, 3.0, 100001);
  CHECK(hessian_check_frame(scaled, 1.0, 0.25, wide) >= -1e-12);
  CHECK(hessian_check_frame(scaled, 1.0, 0.2, wide) < 0.0);

  Eigen::MatrixXd loose(2, 2);
  loose << 1, 2, 3, 4;
  CHECK_THROWS_AS(hessian_check_frame(make_dense(loose), 1.0, 1.0, grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(hessian_check_frame(id, 0.0, 1.0, grid), std::invalid_argument);
  CHECK_THROWS_AS(hessian_check_frame(id, 1.0, 1.0, std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("divergence_error carries its iteration index") {
  const divergence_error err(17, "unit test");
  CHECK(err.iteration() == 17);
  CHECK(std::string(err.what()).find("17") != std::string::npos);
}
