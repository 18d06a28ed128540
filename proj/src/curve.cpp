#include "centroflow/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "centroflow/errors.hpp"

namespace centroflow {

namespace {

void require_grid(int n) {
  if (n < 8 || n % 4 != 0) {
    throw InvalidGrid("grid size must be a positive multiple of 4 (>= 8); got " + std::to_string(n));
  }
}

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

}  // namespace

int FourierSpec::harmonics() const noexcept {
  return static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size()));
}

double FourierSpec::operator()(double theta) const {
  double v = a0;
  for (std::size_t n = 0; n < cos_coeffs.size(); ++n) v += cos_coeffs[n] * std::cos(2.0 * (n + 1) * theta);
  for (std::size_t n = 0; n < sin_coeffs.size(); ++n) v += sin_coeffs[n] * std::sin(2.0 * (n + 1) * theta);
  return v;
}

SupportField SupportField::from_samples(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  require_grid(n);
  const int half = n / 2;
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < half; ++i) {
    const double a = values[idx(i)];
    const double b = values[idx(i + half)];
    if (std::abs(a - b) > 1e-12 * scale) {
      throw InvalidGrid("field is not origin-symmetric at index " + std::to_string(i));
    }
    const double avg = 0.5 * (a + b);
    values[idx(i)] = avg;
    values[idx(i + half)] = avg;
  }
  const double lo = *std::min_element(values.begin(), values.end());
  if (!(lo > 0.0)) throw NotACurve(lo);
  return SupportField(std::move(values));
}

SupportField SupportField::constant(double value, int n) {
  return from_samples(std::vector<double>(idx(n), value));
}

SupportField SupportField::scaled(double factor) const {
  if (!(factor > 0.0)) throw OutOfRange("dilation factor must be positive");
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  return SupportField(std::move(v));
}

LinearMap2 LinearMap2::rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, -s, s, c};
}

LinearMap2 LinearMap2::inverse() const {
  const double det = this->det();
  if (det == 0.0) throw InvalidMap(det);
  return {d / det, -b / det, -c / det, a / det};
}

Field sample(const FourierSpec& spec, int n_samples) {
  require_grid(n_samples);
  if (!(n_samples > 4 * spec.harmonics())) {
    throw InvalidGrid("grid of " + std::to_string(n_samples) + " nodes cannot represent " +
                      std::to_string(spec.harmonics()) + " harmonics (need N > 4M)");
  }
  const int half = n_samples / 2;
  Field values(idx(n_samples));
  for (int i = 0; i < half; ++i) {
    const double v = spec(grid_angle(i, n_samples));
    values[idx(i)] = v;
    values[idx(i + half)] = v;
  }
  return values;
}

SupportField synthesize(const FourierSpec& spec, int n_samples) {
  return SupportField::from_samples(sample(spec, n_samples));
}

Field spectral_derivative(std::span<const double> f, int order) {
  if (order != 1 && order != 2) throw OutOfRange("derivative order must be 1 or 2");
  return spectral::derivative(f, order);
}

Field radius_of_curvature(const SupportField& s) {
  Field r = spectral::derivative(s.values(), 2);
  for (int i = 0; i < s.size(); ++i) r[idx(i)] += s[i];
  return r;
}

CurveGeometry geometry(const SupportField& s) {
  const int n = s.size();
  CurveGeometry g;
  g.radius_of_curvature = radius_of_curvature(s);
  const auto& r = g.radius_of_curvature;
  const auto lowest = std::min_element(r.begin(), r.end());
  if (!(*lowest > 0.0)) throw NotConvex(static_cast<int>(lowest - r.begin()), *lowest);

  const Field ds = spectral::derivative(s.values(), 1);
  g.curvature.resize(idx(n));
  g.boundary_points.resize(idx(n));
  Field integrand(idx(n));
  for (int i = 0; i < n; ++i) {
    const double th = grid_angle(i, n);
    const double c = std::cos(th);
    const double sn = std::sin(th);
    g.curvature[idx(i)] = 1.0 / r[idx(i)];
    g.boundary_points[idx(i)] = {s[i] * c - ds[idx(i)] * sn, s[i] * sn + ds[idx(i)] * c};
    integrand[idx(i)] = s[i] * r[idx(i)];
  }
  g.area = 0.5 * spectral::integrate(integrand);
  g.length = spectral::integrate(r);
  return g;
}

SupportField apply_sl2(const SupportField& s, const LinearMap2& t) {
  if (!(std::abs(t.det() - 1.0) <= kSl2Tolerance)) throw InvalidMap(t.det());
  const int n = s.size();
  const int half = n / 2;
  const spectral::Interpolant interp(s.values());
  const LinearMap2 tt = t.transpose();
  std::vector<double> out(idx(n));
  for (int i = 0; i < half; ++i) {
    const double th = grid_angle(i, n);
    const Point2 w = tt.apply({std::cos(th), std::sin(th)});
    const double norm = std::hypot(w[0], w[1]);
    const double v = norm * interp(std::atan2(w[1], w[0]));
    out[idx(i)] = v;
    out[idx(i + half)] = v;
  }
  return SupportField::from_samples(std::move(out));
}

namespace {

// Energy per frequency m = 0..N/2 (both signs counted).
std::vector<double> mode_energies(std::span<const double> f) {
  const auto c = spectral::analyze(f);
  const std::size_t last = c.size() - 1;
  std::vector<double> e(c.size());
  for (std::size_t m = 0; m < c.size(); ++m) e[m] = (m == 0 || m == last ? 1.0 : 2.0) * std::norm(c[m]);
  return e;
}

double off_lattice(const std::vector<double>& e, int k) {
  double off = 0.0;
  for (std::size_t m = 1; m < e.size(); ++m) {
    if (m % static_cast<std::size_t>(2 * k) != 0) off += e[m];
  }
  return off;
}

}  // namespace

int detect_periodicity(std::span<const double> f) {
  const auto e = mode_energies(f);
  double non_mean = 0.0;
  for (std::size_t m = 1; m < e.size(); ++m) non_mean += e[m];
  if (non_mean <= 1e-24 * e[0]) return kUnboundedPeriodicity;
  const int max_k = static_cast<int>(f.size()) / 4;
  for (int k = max_k; k >= 2; --k) {
    if (off_lattice(e, k) <= 1e-10 * non_mean) return k;
  }
  return 1;
}

double off_lattice_energy(std::span<const double> f, int k) {
  if (k < 1) throw OutOfRange("periodicity index must be >= 1");
  const auto e = mode_energies(f);
  double total = 0.0;
  for (double v : e) total += v;
  return total > 0.0 ? off_lattice(e, k) / total : 0.0;
}

JohnBounds john_bounds(int k) {
  if (k < 2) throw OutOfRange("john_bounds requires k >= 2; got " + std::to_string(k));
  JohnBounds b;
  const double pi = std::numbers::pi;
  b.c_k = 2.0 * k * std::tan(pi / (2.0 * k)) / pi;
  b.s_upper = pi * std::sqrt(b.c_k) / 2.0;
  b.s_lower = 1.0 / (pi * std::sqrt(b.c_k));
  return b;
}

CoefficientBoundCheck fourier_coefficient_bound_check(const SupportField& s, int k) {
  if (k < 1) throw OutOfRange("periodicity index must be >= 1");
  const auto c = spectral::analyze(s.values());
  const int nyquist = s.size() / 2;
  const double s0 = c[0].real();
  CoefficientBoundCheck check;
  for (int n = 1; 2 * n * k <= nyquist; ++n) {
    const int m = 2 * n * k;
    const double amplitude = (m == nyquist ? 1.0 : 2.0) * std::abs(c[idx(m)]);
    const double lattice = 4.0 * n * n * k * k - 1.0;
    check.worst_ratio = std::max(check.worst_ratio, amplitude * lattice / (2.0 * s0));
  }
  check.pass = check.worst_ratio <= 1.0;
  return check;
}

double oscillation(std::span<const double> f) {
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  return *hi - *lo;
}

void write_curve_csv(std::ostream& os, const SupportField& s) {
  const CurveGeometry g = geometry(s);
  os << "theta,s,r,sigma\n";
  char line[128];
  for (int i = 0; i < s.size(); ++i) {
    const double r = g.radius_of_curvature[idx(i)];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", grid_angle(i, s.size()), s[i], r,
                  s[i] * std::cbrt(r));
    os << line;
  }
}

SupportField read_curve_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("curve CSV is empty");
  int column = -1;
  {
    std::istringstream hs(header);
    std::string name;
    for (int c = 0; std::getline(hs, name, ','); ++c) {
      if (!name.empty() && name.back() == '\r') name.pop_back();
      if (name == "s") column = c;
    }
  }
  if (column < 0) throw ConfigError("curve CSV header lacks an 's' column");
  std::vector<double> values;
  std::string row;
  int line_no = 1;
  while (std::getline(is, row)) {
    ++line_no;
    if (row.empty()) continue;
    std::istringstream rs(row);
    std::string cell;
    int c = 0;
    bool found = false;
    while (std::getline(rs, cell, ',')) {
      if (c++ == column) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) throw ConfigError("curve CSV line " + std::to_string(line_no) + ": bad number");
        values.push_back(v);
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("curve CSV line " + std::to_string(line_no) + ": missing 's' column");
  }
  return SupportField::from_samples(std::move(values));
}

}  // namespace centroflow
