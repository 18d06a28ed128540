#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "centroflow/spectral.hpp"

namespace centroflow {

/// Truncated Fourier series of a pi-periodic field.
///
/// Index n of `cos_coeffs` / `sin_coeffs` (zero-based n-1) multiplies
/// cos(2 n theta) / sin(2 n theta); only even harmonics exist for
/// origin-symmetric curves.
struct FourierSpec {
  double a0 = 1.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  int harmonics() const noexcept;
  /// Evaluates the series at an angle.
  double operator()(double theta) const;
};

/// Samples of the support function of an origin-symmetric convex curve.
///
/// Invariants: N divisible by 4, every sample positive, and
/// values[i] == values[i + N/2] exactly.
class SupportField {
 public:
  /// Validates positivity and grid size; antipodal pairs that agree to 1e-12
  /// (relative) are averaged so symmetry holds exactly afterwards.
  static SupportField from_samples(std::vector<double> values);

  /// Same, for a constant field.
  static SupportField constant(double value, int n);

  int size() const noexcept { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const noexcept { return values_; }
  const Field& field() const noexcept { return values_; }

  /// Multiplies by a positive constant (a dilation of the body).
  SupportField scaled(double factor) const;

 private:
  explicit SupportField(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

using Point2 = std::array<double, 2>;

/// Euclidean data derived from a support function.
struct CurveGeometry {
  Field radius_of_curvature;  // r = s'' + s
  Field curvature;            // 1 / r
  std::vector<Point2> boundary_points;
  double area = 0.0;
  double length = 0.0;
};

/// A 2x2 real matrix [[a, b], [c, d]].
struct LinearMap2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static LinearMap2 identity() { return {}; }
  static LinearMap2 diagonal(double x, double y) { return {x, 0.0, 0.0, y}; }
  static LinearMap2 rotation(double angle);

  double det() const noexcept { return a * d - b * c; }
  LinearMap2 transpose() const noexcept { return {a, c, b, d}; }
  LinearMap2 inverse() const;
  Point2 apply(const Point2& v) const noexcept { return {a * v[0] + b * v[1], c * v[0] + d * v[1]}; }
  friend LinearMap2 operator*(const LinearMap2& l, const LinearMap2& r) noexcept {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
};

/// Tolerance on |det T - 1| for maps used as SL(2) elements.
constexpr double kSl2Tolerance = 1e-12;

/// Sentinel periodicity reported for constant fields.
constexpr int kUnboundedPeriodicity = std::numeric_limits<int>::max();

struct JohnBounds {
  double s_lower = 0.0;
  double s_upper = 0.0;
  double c_k = 0.0;
};

struct CoefficientBoundCheck {
  bool pass = true;
  /// max over harmonics n of |s_n| (4 n^2 k^2 - 1) / (2 s_0); pass iff <= 1.
  double worst_ratio = 0.0;
};

/// Samples a Fourier series on N nodes. Requires N % 4 == 0 and N > 4M.
SupportField synthesize(const FourierSpec& spec, int n_samples);

/// Samples a Fourier series without the positivity requirement (weights, targets).
Field sample(const FourierSpec& spec, int n_samples);

/// Exact derivative of the trigonometric interpolant, order 1 or 2.
Field spectral_derivative(std::span<const double> f, int order);

/// Radius of curvature, area, length and boundary. Throws NotConvex.
CurveGeometry geometry(const SupportField& s);

/// Radius of curvature s'' + s without the positivity check.
Field radius_of_curvature(const SupportField& s);

/// Support function of T(K): s_T(z) = |T^t z| s(T^t z / |T^t z|). Throws InvalidMap.
SupportField apply_sl2(const SupportField& s, const LinearMap2& t);

/// Largest k such that the non-constant Fourier energy sits on harmonics
/// cos/sin(2 n k theta) within relative tolerance 1e-10; kUnboundedPeriodicity
/// for constant fields.
int detect_periodicity(std::span<const double> f);

/// Fraction of the total (mean-square) energy carried by harmonics off the
/// lattice of frequencies 2 n k.
double off_lattice_energy(std::span<const double> f, int k);

/// Support-function bounds for pi/k-periodic convex curves of area pi. Throws OutOfRange for k < 2.
JohnBounds john_bounds(int k);

/// Checks |s_n| <= 2 s_0 / (4 n^2 k^2 - 1) for the amplitudes s_n of cos/sin(2 n k theta).
CoefficientBoundCheck fourier_coefficient_bound_check(const SupportField& s, int k);

/// Oscillation max - min of a field.
double oscillation(std::span<const double> f);

/// Writes `theta,s,r,sigma` rows at 17 significant digits.
void write_curve_csv(std::ostream& os, const SupportField& s);
/// Reads the `s` column of a curve CSV.
SupportField read_curve_csv(std::istream& is);

}  // namespace centroflow
