#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>

#include "centroflow/curve.hpp"

namespace testing {

using centroflow::Field;

inline constexpr double kPi = std::numbers::pi;

inline Field tabulate(int n, const std::function<double(double)>& f) {
  Field out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(centroflow::grid_angle(i, n));
  return out;
}

inline double max_error(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_error(std::span<const double> a, const std::function<double(double)>& f) {
  const int n = static_cast<int>(a.size());
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(a[static_cast<std::size_t>(i)] - f(centroflow::grid_angle(i, n))));
  }
  return worst;
}

inline centroflow::FourierSpec cosine_spec(double a0, std::vector<double> cos_coeffs) {
  centroflow::FourierSpec s;
  s.a0 = a0;
  s.cos_coeffs = std::move(cos_coeffs);
  return s;
}

}  // namespace testing
