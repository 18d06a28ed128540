#include "centroflow/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace centroflow {

Field grid_angles(int n) {
  Field theta(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) theta[static_cast<std::size_t>(i)] = grid_angle(i, n);
  return theta;
}

namespace spectral {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per size under a lock and never destroyed.
struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

const PlanPair& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> real(static_cast<std::size_t>(n));
  std::vector<Complex> spec(static_cast<std::size_t>(n / 2 + 1));
  auto* out = reinterpret_cast<fftw_complex*>(spec.data());
  PlanPair plans;
  plans.r2c = fftw_plan_dft_r2c_1d(n, real.data(), out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.c2r = fftw_plan_dft_c2r_1d(n, out, real.data(),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
  if (plans.r2c == nullptr || plans.c2r == nullptr) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(n, plans).first->second;
}

// i^order without rounding.
Complex i_pow(int order) {
  switch (((order % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void drop_noise(std::vector<Complex>& c) {
  double peak = 0.0;
  for (const auto& v : c) peak = std::max(peak, std::abs(v));
  const double floor = kNoiseFloor * peak;
  for (auto& v : c) {
    if (std::abs(v) < floor) v = 0.0;
  }
}

}  // namespace

std::vector<Complex> analyze(std::span<const double> f) {
  const int n = static_cast<int>(f.size());
  std::vector<Complex> out(static_cast<std::size_t>(n / 2 + 1));
  // r2c with FFTW_ESTIMATE leaves the input untouched, but the API takes a
  // non-const pointer.
  std::vector<double> in(f.begin(), f.end());
  fftw_execute_dft_r2c(plans_for(n).r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / n;
  for (auto& c : out) c *= scale;
  return out;
}

Field synthesize(std::span<const Complex> coeffs, int n) {
  std::vector<Complex> work(coeffs.begin(), coeffs.end());
  Field out(static_cast<std::size_t>(n));
  fftw_execute_dft_c2r(plans_for(n).c2r, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  return out;
}

Field derivative(std::span<const double> f, int order) {
  const int n = static_cast<int>(f.size());
  if (order == 0) return Field(f.begin(), f.end());
  auto c = analyze(f);
  const int nyquist = n / 2;
  drop_noise(c);
  const Complex unit = i_pow(order);
  for (int m = 0; m <= nyquist; ++m) {
    c[static_cast<std::size_t>(m)] *= unit * std::pow(static_cast<double>(m), order);
  }
  if (order % 2 == 1) c[static_cast<std::size_t>(nyquist)] = 0.0;
  return synthesize(c, n);
}

Field antiderivative(std::span<const double> f) {
  const int n = static_cast<int>(f.size());
  auto c = analyze(f);
  const double secular = c[0].real();
  c[0] = 0.0;
  c[static_cast<std::size_t>(n / 2)] = 0.0;
  for (int m = 1; m < n / 2; ++m) c[static_cast<std::size_t>(m)] /= Complex(0.0, static_cast<double>(m));
  Field periodic = synthesize(c, n);
  const double offset = periodic[0];
  Field out(static_cast<std::size_t>(n + 1));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = periodic[static_cast<std::size_t>(i)] - offset + secular * grid_angle(i, n);
  }
  out[static_cast<std::size_t>(n)] = secular * kTwoPi;
  return out;
}

double integrate(std::span<const double> f) {
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum * kTwoPi / static_cast<double>(f.size());
}

double mean(std::span<const double> f) {
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum / static_cast<double>(f.size());
}

double energy(std::span<const Complex> coeffs) {
  // coeffs is a half spectrum of an even-length grid; the last entry is Nyquist.
  double e = std::norm(coeffs[0]);
  const std::size_t last = coeffs.size() - 1;
  for (std::size_t m = 1; m < last; ++m) e += 2.0 * std::norm(coeffs[m]);
  if (last > 0) e += std::norm(coeffs[last]);
  return e;
}

Interpolant::Interpolant(std::span<const double> f)
    : coeffs_(analyze(f)), n_(static_cast<int>(f.size())) {}

Interpolant::Interpolant(std::vector<Complex> coeffs, int n) : coeffs_(std::move(coeffs)), n_(n) {}

double Interpolant::derivative(double theta, int order) const {
  const int nyquist = n_ / 2;
  double value = order == 0 ? coeffs_[0].real() : 0.0;
  // Powers of e^{i theta} by recurrence, re-anchored periodically to bound drift.
  const Complex unit = i_pow(order);
  const Complex step = std::polar(1.0, theta);
  Complex phase = step;
  for (int m = 1; m < nyquist; ++m) {
    if (m % 64 == 0) phase = std::polar(1.0, m * theta);
    const Complex factor = unit * std::pow(static_cast<double>(m), order);
    value += 2.0 * (factor * coeffs_[static_cast<std::size_t>(m)] * phase).real();
    phase *= step;
  }
  if (order % 2 == 0) {
    const double sign = (order / 2) % 2 == 0 ? 1.0 : -1.0;
    const double k = static_cast<double>(nyquist);
    value += sign * std::pow(k, order) * coeffs_[static_cast<std::size_t>(nyquist)].real() *
             std::cos(k * theta);
  }
  return value;
}

}  // namespace spectral
}  // namespace centroflow
