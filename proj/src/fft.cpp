#include "cps/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace cps::fft {
namespace {

// Plans are cached for the process lifetime, keyed by shape and direction.
// FFTW_UNALIGNED lets a cached plan execute against any caller buffer via the
// new-array interface; FFTW_ESTIMATE keeps planning deterministic (no runtime
// measurement, so repeated runs use identical plans).
std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

fftw_plan get_plan(int rows, int cols, int sign) {
  std::scoped_lock lock(plan_mutex);
  const auto key = std::make_tuple(rows, cols, sign);
  if (auto it = plan_cache.find(key); it != plan_cache.end()) return it->second;

  const std::size_t n = cols > 0 ? static_cast<std::size_t>(rows) * cols
                                 : static_cast<std::size_t>(rows);
  std::vector<std::complex<double>> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p = cols > 0
                    ? fftw_plan_dft_2d(rows, cols, buf, buf, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED)
                    : fftw_plan_dft_1d(rows, buf, buf, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw std::runtime_error("fft: plan creation failed");
  plan_cache.emplace(key, p);
  return p;
}

void run(std::span<std::complex<double>> data, int rows, int cols, int sign) {
  const std::size_t expect = cols > 0 ? static_cast<std::size_t>(rows) * cols
                                      : static_cast<std::size_t>(rows);
  if (data.empty() || data.size() != expect)
    throw std::invalid_argument("fft: buffer size does not match transform shape");
  fftw_plan p = get_plan(rows, cols, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, buf, buf);  // new-array execution is thread safe
}

void scale(std::span<std::complex<double>> data) {
  const double s = 1.0 / static_cast<double>(data.size());
  for (auto& z : data) z *= s;
}

}  // namespace

void forward(std::span<std::complex<double>> data) {
  run(data, static_cast<int>(data.size()), 0, FFTW_FORWARD);
}

void inverse(std::span<std::complex<double>> data) {
  run(data, static_cast<int>(data.size()), 0, FFTW_BACKWARD);
  scale(data);
}

void forward_2d(std::span<std::complex<double>> data, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("fft: bad 2d shape");
  run(data, rows, cols, FFTW_FORWARD);
}

void inverse_2d(std::span<std::complex<double>> data, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("fft: bad 2d shape");
  run(data, rows, cols, FFTW_BACKWARD);
  scale(data);
}

}  // namespace cps::fft
