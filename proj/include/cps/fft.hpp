#pragma once

#include <complex>
#include <span>

namespace cps::fft {

// In-place complex transforms with cached plans. Forward transforms are
// unnormalized (sum of e^{-2*pi*i*...} terms); inverse transforms divide by
// the element count, so inverse(forward(x)) == x up to rounding. The 2D
// variants treat the buffer as row-major rows x cols.
void forward(std::span<std::complex<double>> data);
void inverse(std::span<std::complex<double>> data);
void forward_2d(std::span<std::complex<double>> data, int rows, int cols);
void inverse_2d(std::span<std::complex<double>> data, int rows, int cols);

}  // namespace cps::fft
