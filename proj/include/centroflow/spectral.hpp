#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace centroflow {

/// Samples of a 2*pi-periodic function on the uniform grid theta_i = 2*pi*i/N.
using Field = std::vector<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Grid angle of node i on an N-point grid.
inline double grid_angle(int i, int n) { return kTwoPi * static_cast<double>(i) / n; }

/// Uniform grid angles for an N-point grid.
Field grid_angles(int n);

namespace spectral {

using Complex = std::complex<double>;

/// Normalized half-spectrum c_m = (1/N) sum_i f_i exp(-i m theta_i), m = 0..N/2.
///
/// With this normalization f(theta) = c_0 + 2 Re sum_{0<m<N/2} c_m e^{i m theta}
/// + c_{N/2} cos(N theta / 2). Plans are cached per N; all functions here are
/// safe to call concurrently.
std::vector<Complex> analyze(std::span<const double> f);

/// Inverse of analyze(): samples of the trigonometric interpolant on N nodes.
Field synthesize(std::span<const Complex> coeffs, int n);

/// d^order f / d theta^order of the trigonometric interpolant.
///
/// The Nyquist mode is dropped for odd orders (its derivative is not a real
/// interpolant) and kept for even orders. Coefficients below
/// kNoiseFloor times the largest one are treated as roundoff and zeroed.
Field derivative(std::span<const double> f, int order);

constexpr double kNoiseFloor = 1e-15;

/// Antiderivative F with F(0) = 0, including the secular term c_0 * theta.
///
/// Returns N + 1 samples: F(theta_0), ..., F(theta_{N-1}), F(2*pi).
Field antiderivative(std::span<const double> f);

/// Rectangle-rule integral over [0, 2*pi). Spectrally accurate for periodic data.
double integrate(std::span<const double> f);

/// Mean value over the grid.
double mean(std::span<const double> f);

/// Fourier energy sum_m |c_m|^2 with both +m and -m counted (Parseval mean square).
double energy(std::span<const Complex> coeffs);

/// Evaluates the trigonometric interpolant of a grid field at arbitrary angles.
class Interpolant {
 public:
  explicit Interpolant(std::span<const double> f);
  Interpolant(std::vector<Complex> coeffs, int n);

  double operator()(double theta) const { return derivative(theta, 0); }
  /// Exact derivative of the interpolant (Nyquist handled as in spectral::derivative).
  double derivative(double theta, int order) const;

  int size() const noexcept { return n_; }
  const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }

 private:
  std::vector<Complex> coeffs_;
  int n_;
};

}  // namespace spectral
}  // namespace centroflow
