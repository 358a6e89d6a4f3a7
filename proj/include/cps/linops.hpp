#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace cps {

// Small odd-sided convolution kernel, row-major side x side.
struct Psf2D {
  int side = 1;
  std::vector<double> taps{1.0};
  bool normalized = true;

  double at(int i, int j) const { return taps[static_cast<std::size_t>(i) * side + j]; }
};

// Samples exp(-(i^2+j^2)/(2 sigma^2)) on the centered integer grid and
// normalizes the taps to sum to 1.
Psf2D gaussian_psf(int side = 5, double sigma_psf = 1.0);

// Immutable forward model with matched adjoint. Instances are cheap to copy
// (shared internal state) and reentrant: apply/adjoint allocate their own
// scratch, so concurrent calls are safe.
class LinearOperator {
 public:
  enum class Kind { Identity, Dense, PartialIDFT, Conv2D, RealComposite };

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> adjoint(std::span<const double> y) const;

  int domain_dim() const { return domain_; }
  int range_dim() const { return range_; }
  std::optional<double> frame_constant() const { return frame_; }
  Kind kind() const { return kind_; }

 private:
  using VecFn = std::function<std::vector<double>(std::span<const double>)>;

  LinearOperator(Kind kind, int domain, int range, std::optional<double> frame,
                 VecFn fwd, VecFn adj);

  Kind kind_;
  int domain_;
  int range_;
  std::optional<double> frame_;
  VecFn fwd_;
  VecFn adj_;

  friend LinearOperator make_identity(int n);
  friend LinearOperator make_dense(Eigen::MatrixXd a);
  friend LinearOperator make_partial_idft(int m, int n);
  friend LinearOperator make_conv2d(const Psf2D& psf, int rows, int cols);
  friend LinearOperator make_real_composite(const Eigen::MatrixXcd& h);
};

LinearOperator make_identity(int n);
LinearOperator make_dense(Eigen::MatrixXd a);

// Maps the stacked real/imaginary parts [Re x; Im x] of a length-n complex
// spectrum to the real part of the first m samples of its inverse DFT, with
// the 1/sqrt(n) normalization that makes apply(adjoint(.)) the identity on
// the range side. Domain dimension is 2n, range dimension m.
LinearOperator make_partial_idft(int m, int n);

// Circular (periodic) 2D convolution with the PSF centered on its middle tap,
// realized through FFT diagonalization. Domain == range == rows*cols.
LinearOperator make_conv2d(const Psf2D& psf, int rows, int cols);

// Exact squared spectral norm of the circular convolution: max over DFT bins
// of |transfer function|^2, evaluated by direct summation over the PSF taps
// (no FFT involved, so it doubles as an independent cross-check).
double conv_opnorm_sq(const Psf2D& psf, int rows, int cols);

// Real-composite form [[Re H, -Im H], [Im H, Re H]] of a complex matrix,
// mapping stacked [Re x; Im x] to stacked [Re Hx; Im Hx].
LinearOperator make_real_composite(const Eigen::MatrixXcd& h);

struct OpnormEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Largest eigenvalue of A^T A (squared spectral norm) by power iteration with
// Rayleigh-quotient estimates. The start vector is deterministic from the
// seed and all-positive. Non-convergence returns the best estimate with the
// converged flag cleared.
OpnormEstimate opnorm_sq(const LinearOperator& op, double tol = 1e-6,
                         int max_iter = 200, std::uint64_t seed = 20220901);

// Max over trials of |<Ax, y> - <x, A^T y>| / (|x| |y|) on random Gaussian
// pairs; the standard adjoint-consistency check.
double dot_test(const LinearOperator& op, int trials, std::uint64_t seed);

// Max over random v of |A^T A v - r v| / |v| where r is the operator's frame
// constant. Throws when no frame constant is set.
double frame_residual(const LinearOperator& op, int trials, std::uint64_t seed);

}  // namespace cps
