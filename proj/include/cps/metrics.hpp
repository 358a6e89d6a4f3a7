#pragma once

#include <span>

#include "cps/image.hpp"

namespace cps {

// Root-mean-square and mean-absolute error; inputs must have equal nonzero
// length.
double rmse(std::span<const double> a, std::span<const double> b);
double mae(std::span<const double> a, std::span<const double> b);

// 20 log10(peak / rmse) against the reference grid's peak (255 by default),
// capped at the 99 dB sentinel for (near-)exact matches.
double psnr(const ImageGrid& ref, const ImageGrid& est);

// Mean local SSIM over all fully-interior 11x11 windows with the standard
// Gaussian weighting (sigma 1.5) and stabilizers K1=0.01, K2=0.03 at dynamic
// range 255. Requires both dimensions >= 11.
double ssim(const ImageGrid& ref, const ImageGrid& est);

}  // namespace cps
