#include <doctest.h>

#include <random>

#include "centroflow/errors.hpp"
#include "centroflow/obstruction.hpp"
#include "centroflow/solver.hpp"
#include "support.hpp"

using namespace centroflow;
using namespace testing;

namespace {

Field two_plus_cos(int n) {
  return tabulate(n, [](double t) { return 2.0 + std::cos(2.0 * t); });
}

}  // namespace

TEST_CASE("B multipliers") {
  // (cos mt - 1) / sin^2 t integrates to -pi |m| for even m
  for (int m : {0, 2, 4, 6, 10, 20}) CHECK(b_multiplier(m) == doctest::Approx(-kPi * m).epsilon(1e-12).scale(1.0));
  CHECK(b_multiplier(-4) == doctest::Approx(b_multiplier(4)).epsilon(1e-15));
}

TEST_CASE("B functional closed form") {
  const Field f = two_plus_cos(128);
  CHECK(b_functional(f, 0.0) == doctest::Approx(-2.0 * kPi).epsilon(1e-10));
  CHECK(b_functional(f, 0.0) == doctest::Approx(-6.283185).epsilon(1e-6));
  for (double x : {0.3, 1.0, kPi / 2.0, 2.5}) {
    CHECK(std::abs(b_functional(f, x) + 2.0 * kPi * std::cos(2.0 * x)) < 1e-10);
  }
  const Field b = b_field(f);
  REQUIRE(b.size() == 64);
  for (int i = 0; i < 64; ++i) {
    CHECK(std::abs(b[static_cast<std::size_t>(i)] + 2.0 * kPi * std::cos(2.0 * grid_angle(i, 128))) < 1e-10);
  }
  for (double v : b_field(Field(64, 3.0))) CHECK(v == 0.0);
  CHECK(b_functional(Field(64, 3.0), 0.7) == 0.0);
}

TEST_CASE("B quadrature converges") {
  const Field f = tabulate(64, [](double t) { return 2.0 + std::cos(2.0 * t) + 0.2 * std::cos(6.0 * t); });
  const double exact = -2.0 * kPi - 0.2 * 6.0 * kPi;  // x = 0
  double prev = INFINITY;
  for (int m = 8; m <= 2048; m *= 2) {
    const double err = std::abs(b_functional(f, 0.0, m) - exact);
    CHECK((err < 1e-10 || err * 4.0 <= prev));
    prev = err;
  }
  CHECK(prev < 1e-10);
}

TEST_CASE("B commutes with shifts") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng), shift = 3.0 * u(rng);
    auto phi = [&](double t) { return 2.0 + a * std::cos(2.0 * t) + b * std::sin(4.0 * t) + c * std::cos(6.0 * t + 1.0); };
    const Field f = tabulate(128, phi);
    const Field g = tabulate(128, [&](double t) { return phi(t + shift); });
    for (double x : {0.0, 0.4, 1.3, 2.9}) CHECK(std::abs(b_functional(g, x) - b_functional(f, x + shift)) < 1e-8);
  }
}

TEST_CASE("winding number") {
  CHECK(winding_number(two_plus_cos(128)) == -1);
  CHECK(winding_number(two_plus_cos(128), 4096) == winding_number(two_plus_cos(128), 1024));
  const Field reflected = tabulate(128, [](double t) { return 2.0 + std::cos(-2.0 * t); });
  CHECK(winding_number(reflected) == -1);
  CHECK_THROWS_AS(winding_number(Field(64, 1.0)), OriginHit);
}

TEST_CASE("winding number agrees with dense angle accumulation") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const Field f = tabulate(128, [&](double t) {
      return 2.0 + a * std::cos(2.0 * t) + b * std::sin(4.0 * t) + c * std::cos(6.0 * t);
    });
    // dense oracle: accumulate wrapped angle increments of (-B, f') over [0, pi)
    const spectral::Interpolant fi(f);
    const int n = 4096;
    double total = 0.0, prev = NAN;
    double min_norm = INFINITY;
    for (int i = 0; i <= n; ++i) {
      const double x = kPi * i / n;
      const double bx = -b_functional(f, x, 512), dx = fi.derivative(x, 1);
      min_norm = std::min(min_norm, std::hypot(bx, dx));
      const double ang = std::atan2(dx, bx);
      if (i > 0) total += std::remainder(ang - prev, kTwoPi);
      prev = ang;
    }
    if (min_norm < 1e-3) continue;
    CHECK(winding_number(f) == static_cast<int>(std::lround(total / kTwoPi)));
  }
}

TEST_CASE("Kazdan-Warner integrals") {
  const Field c(64, 1.7);
  const auto kw0 = kazdan_warner(c, synthesize(cosine_spec(1.0, {0.05}), 64));
  for (double v : kw0) CHECK(v == 0.0);

  // u = 1: int_0^pi (Phi^3)' sin 2x = -6 int (2 + cos 2x)^2 sin^2 2x = -51 pi / 4
  const auto kw = kazdan_warner(two_plus_cos(128), SupportField::constant(1.0, 128));
  CHECK(std::abs(kw[0]) < 1e-12);
  CHECK(std::abs(kw[1]) < 1e-12);
  CHECK(kw[2] == doctest::Approx(-51.0 * kPi / 4.0).epsilon(1e-12));
}

TEST_CASE("necessary condition") {
  const NecessaryCondition a = necessary_condition(two_plus_cos(128));
  CHECK(a.critical.count == 4);
  CHECK_FALSE(a.pass);
  const NecessaryCondition b = necessary_condition(Field(64, 1.0));
  CHECK(b.critical.degenerate);
  CHECK(b.pass);
  const NecessaryCondition c = necessary_condition(forward(synthesize(cosine_spec(1.0, {0.0, 0.05}), 256)));
  CHECK(c.critical.count >= 8);
  CHECK(c.pass);
}

TEST_CASE("diagnose") {
  const ObstructionReport r = diagnose(two_plus_cos(128));
  CHECK(r.critical.count == 4);
  CHECK_FALSE(r.necessary_condition_pass);
  CHECK(r.b_nondegenerate);
  REQUIRE(r.winding.has_value());
  CHECK(*r.winding == -1);
  CHECK_FALSE(r.theorem_b_applicable);
  CHECK_FALSE(r.kw.has_value());
  CHECK(r.b_values.size() == 64);

  const ObstructionReport one = diagnose(Field(64, 1.0));
  CHECK(one.critical.degenerate);
  CHECK(one.necessary_condition_pass);
  REQUIRE(one.kw.has_value());
  for (double v : *one.kw) CHECK(v == 0.0);
  CHECK_FALSE(one.b_nondegenerate);
  CHECK_FALSE(one.winding.has_value());

  const SupportField u = synthesize(cosine_spec(1.0, {0.0, 0.05}), 256);
  const ObstructionReport sol = diagnose(forward(u), &u);
  CHECK(sol.necessary_condition_pass);
  REQUIRE(sol.kw.has_value());
  for (double v : *sol.kw) CHECK(std::abs(v) < 1e-5);
}
