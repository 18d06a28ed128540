#include <doctest.h>

#include <random>
#include <sstream>

#include "centroflow/curve.hpp"
#include "centroflow/errors.hpp"
#include "centroflow/shapes.hpp"
#include "support.hpp"

using namespace centroflow;
using namespace testing;

TEST_CASE("synthesize evaluates the cosine series") {
  const SupportField circle = synthesize(cosine_spec(1.0, {}), 64);
  CHECK(circle.size() == 64);
  for (int i = 0; i < 64; ++i) CHECK(circle[i] == 1.0);

  const SupportField s4 = synthesize(cosine_spec(1.0, {0.0, 0.1}), 128);
  CHECK(s4[0] == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(max_error(s4.values(), [](double t) { return 1.0 + 0.1 * std::cos(4.0 * t); }) < 1e-15);

  const SupportField s2 = synthesize(cosine_spec(1.0, {0.1}), 128);
  const auto [lo, hi] = std::minmax_element(s2.values().begin(), s2.values().end());
  CHECK(*lo == doctest::Approx(0.9));
  CHECK(*hi == doctest::Approx(1.1));
}

TEST_CASE("synthesize enforces the grid and positivity") {
  CHECK_THROWS_AS(synthesize(cosine_spec(1.0, {}), 30), InvalidGrid);
  CHECK_THROWS_AS(synthesize(cosine_spec(1.0, {0.0, 0.0, 0.1}), 12), InvalidGrid);
  try {
    synthesize(cosine_spec(0.5, {1.0}), 64);
    FAIL("expected NotACurve");
  } catch (const NotACurve& e) {
    CHECK(e.min_value() == doctest::Approx(-0.5));
  }
}

TEST_CASE("samples are exactly antipodally symmetric") {
  FourierSpec spec = cosine_spec(1.0, {0.03, -0.01, 0.004});
  spec.sin_coeffs = {0.02, 0.0, -0.003};
  const SupportField s = synthesize(spec, 96);
  for (int i = 0; i < 48; ++i) CHECK(s[i] == s[i + 48]);
  CHECK_THROWS_AS(SupportField::from_samples({1.0, 1.0, 1.0, 1.1, 1.0, 1.0, 1.0, 1.0}), InvalidGrid);
}

TEST_CASE("spectral derivative of band-limited fields") {
  const Field f = tabulate(64, [](double t) { return std::cos(2.0 * t); });
  CHECK(max_error(spectral_derivative(f, 1), [](double t) { return -2.0 * std::sin(2.0 * t); }) < 1e-12);
  CHECK(max_error(spectral_derivative(f, 2), [](double t) { return -4.0 * std::cos(2.0 * t); }) < 1e-12);
  const Field one(64, 1.0);
  CHECK(max_error(spectral_derivative(one, 1), [](double) { return 0.0; }) == 0.0);
}

TEST_CASE("spectral derivative is linear and composes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Field a(128), b(128);
    const double ca = u(rng), cb = u(rng);
    const double p1 = u(rng), p2 = u(rng);
    a = tabulate(128, [&](double t) { return std::sin(6.0 * t + p1) + 0.3 * std::cos(10.0 * t); });
    b = tabulate(128, [&](double t) { return std::cos(2.0 * t + p2) - 0.2 * std::sin(14.0 * t); });
    Field mix(128);
    for (std::size_t i = 0; i < 128; ++i) mix[i] = ca * a[i] + cb * b[i] + 3.0;
    const Field da = spectral_derivative(a, 1), db = spectral_derivative(b, 1);
    const Field dmix = spectral_derivative(mix, 1);
    Field expected(128);
    for (std::size_t i = 0; i < 128; ++i) expected[i] = ca * da[i] + cb * db[i];
    CHECK(max_error(dmix, expected) < 1e-12);
    CHECK(max_error(spectral_derivative(a, 2), spectral_derivative(da, 1)) < 1e-12);
  }
}

TEST_CASE("geometry of circles and ellipses") {
  const CurveGeometry c = geometry(SupportField::constant(1.0, 64));
  CHECK(c.area == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(c.length == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(max_error(c.radius_of_curvature, [](double) { return 1.0; }) < 1e-14);

  // r = 1 - 0.3 cos 2t; (1/2) int (1 + 0.1 cos)(1 - 0.3 cos) = pi (1 - 0.03 / 2)
  const CurveGeometry g = geometry(synthesize(cosine_spec(1.0, {0.1}), 128));
  CHECK(max_error(g.radius_of_curvature, [](double t) { return 1.0 - 0.3 * std::cos(2.0 * t); }) < 1e-13);
  CHECK(g.area == doctest::Approx(0.985 * kPi).epsilon(1e-13));
  CHECK(g.area == doctest::Approx(3.094468).epsilon(1e-6));
  CHECK(g.length == doctest::Approx(2.0 * kPi).epsilon(1e-13));

  const SupportField e = ellipse(2.0, 0.5, 256);
  CHECK(max_error(e.values(), [](double t) {
          return std::sqrt(4.0 * std::cos(t) * std::cos(t) + 0.25 * std::sin(t) * std::sin(t));
        }) < 1e-15);
  CHECK(std::abs(geometry(e).area - kPi) < 1e-10);
}

TEST_CASE("boundary points lie on the support lines") {
  const SupportField s = synthesize(cosine_spec(1.0, {0.05, 0.01}), 64);
  const CurveGeometry g = geometry(s);
  for (int i = 0; i < 64; ++i) {
    const double t = grid_angle(i, 64);
    const Point2 x = g.boundary_points[static_cast<std::size_t>(i)];
    CHECK(x[0] * std::cos(t) + x[1] * std::sin(t) == doctest::Approx(s[i]).epsilon(1e-13));
  }
}

TEST_CASE("non-convex support functions are rejected with the offending index") {
  // r = 1 - 15 a cos 4t < 0 near t = 0 for a = 0.1
  const SupportField s = synthesize(cosine_spec(1.0, {0.0, 0.1}), 64);
  try {
    geometry(s);
    FAIL("expected NotConvex");
  } catch (const NotConvex& e) {
    CHECK(e.radius() < 0.0);
    CHECK(radius_of_curvature(s)[static_cast<std::size_t>(e.index())] <= 0.0);
  }
}

TEST_CASE("accepted curves satisfy the isoperimetric inequality") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const SupportField s = synthesize(random_convex_spec(rng, 128), 128);
    const CurveGeometry g = geometry(s);
    CHECK(g.length * g.length >= 4.0 * kPi * g.area);
    for (double r : g.radius_of_curvature) CHECK(r > 0.0);
  }
}

TEST_CASE("SL(2) action") {
  const SupportField circle = SupportField::constant(1.0, 256);
  const SupportField e = apply_sl2(circle, LinearMap2::diagonal(2.0, 0.5));
  CHECK(e[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e[64] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(geometry(e).area - kPi) < 1e-8);
  CHECK(max_error(e.values(), ellipse(2.0, 0.5, 256).values()) < 1e-12);

  const SupportField s = synthesize(cosine_spec(1.0, {0.05, -0.02}), 128);
  CHECK(max_error(apply_sl2(s, LinearMap2::identity()).values(), s.values()) < 1e-14);

  const SupportField back = apply_sl2(ellipse(2.0, 0.5, 256), LinearMap2::diagonal(0.5, 2.0));
  CHECK(max_error(back.values(), [](double) { return 1.0; }) < 1e-8);

  CHECK_THROWS_AS(apply_sl2(circle, LinearMap2::diagonal(2.0, 1.0)), InvalidMap);
}

TEST_CASE("SL(2) action preserves area and composes") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 10; ++i) {
    const SupportField s = synthesize(random_convex_spec(rng, 512, 1, 3), 512);
    const LinearMap2 t1 = random_sl2(rng);
    const LinearMap2 t2 = random_sl2(rng);
    const SupportField once = apply_sl2(s, t1);
    CHECK(t1.det() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(geometry(once).area - geometry(s).area) < 1e-8);
    const SupportField twice = apply_sl2(once, t2);
    const SupportField direct = apply_sl2(s, t2 * t1);
    CHECK(max_error(twice.values(), direct.values()) < 1e-8);
  }
}

TEST_CASE("periodicity detection") {
  CHECK(detect_periodicity(tabulate(128, [](double t) { return 1.0 + 0.1 * std::cos(4.0 * t); })) == 2);
  CHECK(detect_periodicity(tabulate(128, [](double t) { return 2.0 + std::cos(2.0 * t); })) == 1);
  CHECK(detect_periodicity(tabulate(128, [](double t) {
          return 1.0 + 0.05 * std::cos(6.0 * t) + 0.01 * std::cos(12.0 * t);
        })) == 3);
  CHECK(detect_periodicity(Field(64, 3.0)) == kUnboundedPeriodicity);
  const Field f = tabulate(128, [](double t) { return 1.0 + 0.1 * std::cos(8.0 * t) + 1e-3 * std::sin(2.0 * t); });
  CHECK(detect_periodicity(f) == 1);
  CHECK(off_lattice_energy(f, 4) > 1e-8);
  CHECK(off_lattice_energy(f, 1) < 1e-30);
}

TEST_CASE("John bounds") {
  const JohnBounds b2 = john_bounds(2);
  CHECK(b2.c_k == doctest::Approx(4.0 / kPi).epsilon(1e-14));
  CHECK(b2.c_k == doctest::Approx(1.273240).epsilon(1e-6));
  CHECK(b2.s_upper == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
  CHECK(b2.s_lower == doctest::Approx(1.0 / (2.0 * std::sqrt(kPi))).epsilon(1e-14));
  CHECK(john_bounds(3).c_k == doctest::Approx(1.102658).epsilon(1e-6));
  double prev = john_bounds(2).c_k;
  for (int k = 3; k <= 64; ++k) {
    const double c = john_bounds(k).c_k;
    CHECK(c < prev);
    CHECK(c > 1.0);
    prev = c;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(john_bounds(1), OutOfRange);
}

TEST_CASE("Fourier coefficient bound") {
  const CoefficientBoundCheck c0 = fourier_coefficient_bound_check(SupportField::constant(1.0, 64), 2);
  CHECK(c0.pass);
  CHECK(c0.worst_ratio == 0.0);
  const CoefficientBoundCheck c1 = fourier_coefficient_bound_check(synthesize(cosine_spec(1.0, {0.0, 0.1}), 128), 2);
  CHECK(c1.pass);
  CHECK(c1.worst_ratio == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("periodic random curves satisfy the John bounds") {
  std::mt19937_64 rng(23);
  for (int k = 2; k <= 3; ++k) {
    const JohnBounds b = john_bounds(k);
    for (int i = 0; i < 50; ++i) {
      const SupportField s = normalized_area(synthesize(random_convex_spec(rng, 128, k), 128));
      CHECK(fourier_coefficient_bound_check(s, k).pass);
      const auto [lo, hi] = std::minmax_element(s.values().begin(), s.values().end());
      CHECK(*lo >= b.s_lower);
      CHECK(*hi <= b.s_upper);
      CHECK(detect_periodicity(s.values()) % k == 0);
    }
  }
}

TEST_CASE("curve CSV round trip") {
  const SupportField s = synthesize(cosine_spec(1.0, {0.05, 0.0, 0.002}), 64);
  std::stringstream ss;
  write_curve_csv(ss, s);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "theta,s,r,sigma");
  ss.seekg(0);
  const SupportField back = read_curve_csv(ss);
  CHECK(max_error(back.values(), s.values()) < 1e-15);
}
