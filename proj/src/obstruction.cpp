#include "centroflow/obstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "centroflow/errors.hpp"

namespace centroflow {

namespace {

using spectral::Complex;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

void require_quadrature(int m) {
  if (m < 1) throw OutOfRange("quadrature size must be positive");
}

// Spectrum of B(., f): c_m times the multiplier, odd harmonics dropped.
std::vector<Complex> b_spectrum(std::span<const double> f, int quadrature) {
  auto c = spectral::analyze(f);
  for (std::size_t m = 0; m < c.size(); ++m) {
    c[m] = m % 2 == 0 ? c[m] * b_multiplier(static_cast<int>(m), quadrature) : Complex(0.0);
  }
  return c;
}

Field cube(std::span<const double> f) {
  Field out(f.begin(), f.end());
  for (double& v : out) v = v * v * v;
  return out;
}

}  // namespace

NecessaryCondition necessary_condition(std::span<const double> phi) {
  NecessaryCondition out;
  out.critical = count_critical_points(phi);
  out.pass = out.critical.degenerate || out.critical.count >= 8;
  return out;
}

std::array<double, 3> kazdan_warner(std::span<const double> phi, const SupportField& u) {
  const int n = static_cast<int>(phi.size());
  if (n != u.size()) throw InvalidGrid("Phi and u grids differ");
  const Field d = spectral::derivative(cube(phi), 1);
  std::array<double, 3> out{0.0, 0.0, 0.0};
  const double w = kTwoPi / n;
  for (int i = 0; i < n / 2; ++i) {
    const double x = grid_angle(i, n);
    const double base = d[idx(i)] / (u[i] * u[i]) * w;
    out[0] += base;
    out[1] += base * std::cos(2.0 * x);
    out[2] += base * std::sin(2.0 * x);
  }
  return out;
}

double b_multiplier(int m, int quadrature) {
  require_quadrature(quadrature);
  const double h = std::numbers::pi / quadrature;
  double sum = 0.0;
  for (int j = 0; j < quadrature; ++j) {
    const double t = (j + 0.5) * h;
    const double half = std::sin(0.5 * m * t);
    const double st = std::sin(t);
    sum += -2.0 * half * half / (st * st);
  }
  return sum * h;
}

double b_functional(std::span<const double> f, double x, int quadrature) {
  require_quadrature(quadrature);
  const spectral::Interpolant interp(f);
  const double f0 = interp(x);
  const double f1 = interp.derivative(x, 1);
  const double h = std::numbers::pi / quadrature;
  double sum = 0.0;
  for (int j = 0; j < quadrature; ++j) {
    const double t = (j + 0.5) * h;
    const double st = std::sin(t);
    sum += (interp(x + t) - f0 - 0.5 * f1 * std::sin(2.0 * t)) / (st * st);
  }
  return sum * h;
}

Field b_field(std::span<const double> f, int quadrature) {
  const int n = static_cast<int>(f.size());
  Field full = spectral::synthesize(b_spectrum(f, quadrature), n);
  full.resize(idx(n / 2));
  return full;
}

int winding_number(std::span<const double> f, int samples, int quadrature) {
  if (samples < 8) throw OutOfRange("winding number needs at least 8 samples");
  const int n = static_cast<int>(f.size());
  const spectral::Interpolant b(b_spectrum(f, quadrature), n);
  const spectral::Interpolant phi(f);
  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::abs(v));

  std::vector<double> angle(idx(samples));
  double closest = std::numeric_limits<double>::infinity();
  double closest_x = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double x = std::numbers::pi * j / samples;
    const double u = -b(x);
    const double v = phi.derivative(x, 1);
    const double norm = std::hypot(u, v);
    if (norm < closest) {
      closest = norm;
      closest_x = x;
    }
    angle[idx(j)] = std::atan2(v, u);
  }
  if (!(closest >= 1e-9 * scale)) throw OriginHit(closest_x, closest);

  double total = 0.0;
  for (int j = 0; j < samples; ++j) {
    double d = angle[idx((j + 1) % samples)] - angle[idx(j)];
    d = std::remainder(d, kTwoPi);
    total += d;
  }
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) >= 0.1) throw Error("winding number sampling is too coarse");
  return static_cast<int>(rounded);
}

ObstructionReport diagnose(std::span<const double> phi, const SupportField* u) {
  ObstructionReport r;
  const NecessaryCondition nc = necessary_condition(phi);
  r.critical = nc.critical;
  r.necessary_condition_pass = nc.pass;
  if (u != nullptr) {
    r.kw = kazdan_warner(phi, *u);
  } else if (nc.critical.degenerate) {
    r.kw = std::array<double, 3>{0.0, 0.0, 0.0};
  }

  const Field phi_ode = cube(phi);
  const int n = static_cast<int>(phi.size());
  const auto spectrum = b_spectrum(phi_ode, kDefaultBQuadrature);
  Field full = spectral::synthesize(spectrum, n);
  r.b_values.assign(full.begin(), full.begin() + n / 2);

  double scale = 0.0;
  for (double v : phi_ode) scale = std::max(scale, std::abs(v));
  if (!nc.critical.degenerate) {
    const spectral::Interpolant b(spectrum, n);
    r.b_min_at_critical = std::numeric_limits<double>::infinity();
    for (double x : nc.critical.locations) {
      const double v = b(x);
      r.b_at_critical.push_back(v);
      r.b_min_at_critical = std::min(r.b_min_at_critical, std::abs(v));
    }
    for (double x : nc.critical.tangential) {
      const double v = b(x);
      r.b_at_critical.push_back(v);
      r.b_min_at_critical = std::min(r.b_min_at_critical, std::abs(v));
    }
    r.b_nondegenerate = r.b_min_at_critical > 1e-9 * scale;
  }
  try {
    r.winding = winding_number(phi_ode);
  } catch (const OriginHit&) {
    r.winding.reset();
  }
  r.theorem_b_applicable = r.b_nondegenerate && r.winding.has_value() && *r.winding != -1;
  return r;
}

}  // namespace centroflow
