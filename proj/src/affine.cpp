#include "centroflow/affine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "centroflow/errors.hpp"

namespace centroflow {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

Field convex_radius(const SupportField& s) {
  Field r = radius_of_curvature(s);
  const auto lowest = std::min_element(r.begin(), r.end());
  if (!(*lowest > 0.0)) throw NotConvex(static_cast<int>(lowest - r.begin()), *lowest);
  return r;
}

void require_weight(std::span<const double> psi, int n) {
  if (psi.empty()) return;
  if (static_cast<int>(psi.size()) != n) throw InvalidGrid("weight and curve grids differ");
  for (double v : psi) {
    if (!(v > 0.0)) throw OutOfRange("weight must be positive on the grid");
  }
}

double length_from_radius(const SupportField& s, std::span<const double> r, double p,
                          std::span<const double> psi) {
  const double q = p / (p + 2.0);
  Field integrand(r.size());
  for (int i = 0; i < s.size(); ++i) {
    const double w = psi.empty() ? 1.0 : psi[idx(i)];
    integrand[idx(i)] = w * std::pow(s[i], 1.0 - 3.0 * q) * std::pow(r[idx(i)], 1.0 - q);
  }
  return spectral::integrate(integrand);
}

// Affine curvature of a planar parametrized curve from its first three derivatives.
Field embedding_mu(const Field& x1, const Field& y1, const Field& x2, const Field& y2, const Field& x3,
                   const Field& y3) {
  const std::size_t n = x1.size();
  Field d(n), d23(n), dpow(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = x1[i] * y2[i] - x2[i] * y1[i];
    d23[i] = x2[i] * y3[i] - x3[i] * y2[i];
    dpow[i] = std::pow(d[i], -2.0 / 3.0);
  }
  const Field dpow2 = spectral::derivative(dpow, 2);
  Field mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = d23[i] / std::pow(d[i], 5.0 / 3.0) - 0.5 * dpow2[i];
  return mu;
}

}  // namespace

void require_flow_exponent(double p) {
  if (!(p > 1.0 && p < 2.0)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "p must lie in the open interval (1,2); got %.17g", p);
    throw OutOfRange(buf);
  }
}

Field affine_support(const SupportField& s) {
  const Field r = convex_radius(s);
  Field sigma(r.size());
  for (int i = 0; i < s.size(); ++i) sigma[idx(i)] = s[i] * std::cbrt(r[idx(i)]);
  return sigma;
}

double p_affine_length(const SupportField& s, double p, std::span<const double> psi) {
  require_flow_exponent(p);
  require_weight(psi, s.size());
  const Field r = convex_radius(s);
  return length_from_radius(s, r, p, psi);
}

Field affine_derivative(std::span<const double> f, const SupportField& s, int order) {
  if (order != 1 && order != 2) throw OutOfRange("derivative order must be 1 or 2");
  if (static_cast<int>(f.size()) != s.size()) throw InvalidGrid("field and curve grids differ");
  const Field r = convex_radius(s);
  Field g(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) g[i] = std::pow(r[i], 2.0 / 3.0);
  Field d = spectral::derivative(f, 1);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] /= g[i];
  if (order == 1) return d;
  Field d2 = spectral::derivative(d, 1);
  for (std::size_t i = 0; i < d2.size(); ++i) d2[i] /= g[i];
  return d2;
}

AffineData affine_data(const SupportField& s, double p, std::span<const double> psi) {
  require_flow_exponent(p);
  require_weight(psi, s.size());
  const Field r = convex_radius(s);
  const int n = s.size();
  AffineData a;
  a.sigma.resize(idx(n));
  a.g_density.resize(idx(n));
  for (int i = 0; i < n; ++i) {
    a.sigma[idx(i)] = s[i] * std::cbrt(r[idx(i)]);
    a.g_density[idx(i)] = std::pow(r[idx(i)], 2.0 / 3.0);
  }
  Field d = spectral::derivative(a.sigma, 1);
  for (int i = 0; i < n; ++i) d[idx(i)] /= a.g_density[idx(i)];
  Field dd = spectral::derivative(d, 1);
  a.mu.resize(idx(n));
  for (int i = 0; i < n; ++i) {
    const double sigma_ss = dd[idx(i)] / a.g_density[idx(i)];
    a.mu[idx(i)] = (1.0 - sigma_ss) / a.sigma[idx(i)];
  }
  a.omega_p = length_from_radius(s, r, p, {});
  if (!psi.empty()) a.omega_p_weighted = length_from_radius(s, r, p, psi);
  return a;
}

Field affine_curvature_from_embedding(const SupportField& s) {
  const Field r = convex_radius(s);
  const int n = s.size();
  // x' = r t with t = (-sin, cos); higher derivatives follow spectrally.
  Field x1(idx(n)), y1(idx(n));
  for (int i = 0; i < n; ++i) {
    const double th = grid_angle(i, n);
    x1[idx(i)] = -r[idx(i)] * std::sin(th);
    y1[idx(i)] = r[idx(i)] * std::cos(th);
  }
  const Field x2 = spectral::derivative(x1, 1);
  const Field y2 = spectral::derivative(y1, 1);
  const Field x3 = spectral::derivative(x1, 2);
  const Field y3 = spectral::derivative(y1, 2);
  return embedding_mu(x1, y1, x2, y2, x3, y3);
}

LambdaCurve lambda_curve(const SupportField& s) {
  convex_radius(s);
  const int n = s.size();
  Field x1(idx(n)), y1(idx(n));
  for (int i = 0; i < n; ++i) {
    const double th = grid_angle(i, n);
    const double w = 1.0 / (s[i] * s[i] * s[i]);
    x1[idx(i)] = std::cos(th) * w;
    y1[idx(i)] = std::sin(th) * w;
  }
  const Field xs = spectral::antiderivative(x1);
  const Field ys = spectral::antiderivative(y1);

  LambdaCurve lc;
  lc.points.resize(idx(n + 1));
  for (int i = 0; i <= n; ++i) lc.points[idx(i)] = {xs[idx(i)], ys[idx(i)]};
  lc.closure_defect = std::hypot(xs[idx(n)] - xs[0], ys[idx(n)] - ys[0]);

  const Field x2 = spectral::derivative(x1, 1);
  const Field y2 = spectral::derivative(y1, 1);
  const Field x3 = spectral::derivative(x1, 2);
  const Field y3 = spectral::derivative(y1, 2);
  lc.euclid_curvature.resize(idx(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t k = idx(i);
    const double speed = std::hypot(x1[k], y1[k]);
    lc.euclid_curvature[k] = (x1[k] * y2[k] - x2[k] * y1[k]) / (speed * speed * speed);
  }
  lc.affine_curvature = embedding_mu(x1, y1, x2, y2, x3, y3);
  return lc;
}

void write_lambda_csv(std::ostream& os, const LambdaCurve& curve) {
  os << "theta,x,y,kappa_lambda,mu_lambda\n";
  const int n = static_cast<int>(curve.euclid_curvature.size());
  char line[160];
  for (int i = 0; i <= n; ++i) {
    const std::size_t k = idx(i % n);
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", grid_angle(i, n),
                  curve.points[idx(i)][0], curve.points[idx(i)][1], curve.euclid_curvature[k],
                  curve.affine_curvature[k]);
    os << line;
  }
}

CriticalPoints count_critical_points(std::span<const double> f) {
  const int n = static_cast<int>(f.size());
  CriticalPoints out;
  double mean_abs = 0.0;
  for (double v : f) mean_abs += std::abs(v);
  mean_abs /= n;
  if (oscillation(f) <= 1e-9 * mean_abs) {
    out.degenerate = true;
    return out;
  }

  const spectral::Interpolant interp(f);
  const Field d = spectral::derivative(f, 1);
  double dmax = 0.0;
  for (double v : d) dmax = std::max(dmax, std::abs(v));
  const double floor = 1e-9 * dmax;
  std::vector<int> sign(idx(n));
  for (int i = 0; i < n; ++i) sign[idx(i)] = d[idx(i)] > floor ? 1 : (d[idx(i)] < -floor ? -1 : 0);

  int start = 0;
  while (start < n && sign[idx(start)] == 0) ++start;
  if (start == n) {
    out.degenerate = true;
    return out;
  }

  const double h = kTwoPi / n;
  auto wrap = [](double x) {
    x = std::fmod(x, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    return x >= kTwoPi - 1e-12 ? 0.0 : x;
  };
  auto bisect = [&](double a, double b, int sign_a) {
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (a + b);
      const double v = interp.derivative(m, 1);
      if ((v > 0.0 ? 1 : -1) == sign_a) a = m;
      else b = m;
    }
    return wrap(0.5 * (a + b));
  };

  // Walk the nonzero-signed samples cyclically, starting from `start`.
  int i = start;
  for (int visited = 0; visited < n;) {
    int j = i + 1;
    int gap = 0;
    while (sign[idx(j % n)] == 0) {
      ++j;
      ++gap;
    }
    visited += gap + 1;
    const int si = sign[idx(i % n)];
    const int sj = sign[idx(j % n)];
    const double a = h * i;
    const double b = h * j;
    if (si != sj) {
      ++out.count;
      out.locations.push_back(bisect(a, b, si));
    } else if (gap > 0) {
      out.tangential.push_back(wrap(0.5 * (a + b)));
    }
    i = j;
  }
  out.weighted_count = out.count + 2 * static_cast<int>(out.tangential.size());
  std::sort(out.locations.begin(), out.locations.end());
  std::sort(out.tangential.begin(), out.tangential.end());
  return out;
}

}  // namespace centroflow
