#include "cps/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cps {

namespace {
void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || a.size() != b.size())
    throw std::invalid_argument("metrics: inputs must have equal nonzero length");
}
}  // namespace

double rmse(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double mae(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

double psnr(const ImageGrid& ref, const ImageGrid& est) {
  if (ref.rows != est.rows || ref.cols != est.cols)
    throw std::invalid_argument("psnr: image shapes differ");
  const double err = rmse(ref.pixels, est.pixels);
  if (err == 0.0) return 99.0;
  return std::min(99.0, 20.0 * std::log10(ref.peak / err));
}

double ssim(const ImageGrid& ref, const ImageGrid& est) {
  if (ref.rows != est.rows || ref.cols != est.cols)
    throw std::invalid_argument("ssim: image shapes differ");
  constexpr int kSide = 11;
  constexpr double kSigma = 1.5;
  if (ref.rows < kSide || ref.cols < kSide)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  // Normalized 2D Gaussian window.
  double weights[kSide * kSide];
  double wsum = 0.0;
  for (int i = 0; i < kSide; ++i)
    for (int j = 0; j < kSide; ++j) {
      const double di = i - kSide / 2, dj = j - kSide / 2;
      const double v = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
      weights[i * kSide + j] = v;
      wsum += v;
    }
  for (double& w : weights) w /= wsum;

  const double l = ref.peak;
  const double c1 = (0.01 * l) * (0.01 * l);
  const double c2 = (0.03 * l) * (0.03 * l);

  double total = 0.0;
  long long windows = 0;
  for (int r = 0; r + kSide <= ref.rows; ++r)
    for (int c = 0; c + kSide <= ref.cols; ++c) {
      double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (int i = 0; i < kSide; ++i)
        for (int j = 0; j < kSide; ++j) {
          const double w = weights[i * kSide + j];
          const double x = ref.at(r + i, c + j);
          const double y = est.at(r + i, c + j);
          mx += w * x;
          my += w * y;
          sxx += w * x * x;
          syy += w * y * y;
          sxy += w * x * y;
        }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double cov = sxy - mx * my;
      const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
      const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
      total += num / den;
      ++windows;
    }
  return total / static_cast<double>(windows);
}

}  // namespace cps
