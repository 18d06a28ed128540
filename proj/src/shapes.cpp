#include "centroflow/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "centroflow/errors.hpp"

namespace centroflow {

SupportField ellipse(double a, double b, int n_samples) {
  if (!(a > 0.0 && b > 0.0)) throw OutOfRange("ellipse semi-axes must be positive");
  std::vector<double> v(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double th = grid_angle(i, n_samples);
    v[static_cast<std::size_t>(i)] = std::hypot(a * std::cos(th), b * std::sin(th));
  }
  return SupportField::from_samples(std::move(v));
}

FourierSpec random_convex_spec(std::mt19937_64& rng, int n_samples, int period_k, int max_harmonic) {
  if (period_k < 1 || max_harmonic < period_k) throw OutOfRange("no harmonics available for this period");
  if (n_samples <= 4 * max_harmonic) throw InvalidGrid("grid too coarse for the requested harmonics");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (;;) {
    FourierSpec spec;
    spec.cos_coeffs.assign(static_cast<std::size_t>(max_harmonic), 0.0);
    spec.sin_coeffs.assign(static_cast<std::size_t>(max_harmonic), 0.0);
    for (int n = period_k; n <= max_harmonic; n += period_k) {
      const double bound = 0.3 / (4.0 * n * n - 1.0);
      spec.cos_coeffs[static_cast<std::size_t>(n - 1)] = bound * unit(rng);
      spec.sin_coeffs[static_cast<std::size_t>(n - 1)] = bound * unit(rng);
    }
    const Field s = sample(spec, n_samples);
    if (*std::min_element(s.begin(), s.end()) <= 0.0) continue;
    const Field r = radius_of_curvature(SupportField::from_samples(s));
    if (*std::min_element(r.begin(), r.end()) > 0.0) return spec;
  }
}

LinearMap2 random_sl2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  for (;;) {
    LinearMap2 t{entry(rng), entry(rng), entry(rng), entry(rng)};
    const double det = t.det();
    if (std::abs(det) < 1.0) continue;
    const double f = 1.0 / std::sqrt(std::abs(det));
    t = {t.a * f, t.b * f, t.c * f, t.d * f};
    if (det < 0.0) {
      t.a = -t.a;
      t.b = -t.b;
    }
    return t;
  }
}

SupportField normalized_area(const SupportField& s) {
  return s.scaled(std::sqrt(std::numbers::pi / geometry(s).area));
}

}  // namespace centroflow
