#include <doctest.h>

#include <random>
#include <sstream>

#include "centroflow/affine.hpp"
#include "centroflow/errors.hpp"
#include "centroflow/flow.hpp"
#include "centroflow/shapes.hpp"
#include "support.hpp"

using namespace centroflow;
using namespace testing;

namespace {

FlowConfig small_config(int n = 64) {
  FlowConfig cfg;
  cfg.p = 1.5;
  cfg.n_samples = n;
  return cfg;
}

}  // namespace

TEST_CASE("speed closed forms") {
  for (double p : {1.1, 1.5, 1.9}) {
    FlowConfig cfg = small_config(32);
    cfg.p = p;
    CHECK(max_error(speed(SupportField::constant(1.0, 32), cfg), [](double) { return 1.0; }) < 1e-14);
  }
  const FlowConfig cfg = small_config(32);
  const double r2 = std::pow(2.0, -5.0 / 7.0);
  CHECK(r2 == doctest::Approx(0.609507).epsilon(1e-6));
  CHECK(max_error(speed(SupportField::constant(2.0, 32), cfg), [&](double) { return r2; }) < 1e-14);

  const Field v = speed(synthesize(cosine_spec(1.0, {0.1}), 128), small_config(128));
  CHECK(v[0] == doctest::Approx(std::pow(1.1, -2.0 / 7.0) * std::pow(0.7, -3.0 / 7.0)).epsilon(1e-13));
  CHECK(v[0] == doctest::Approx(1.13386).epsilon(1e-5));

  FlowConfig weighted = small_config(32);
  weighted.psi = cosine_spec(2.0, {});
  CHECK(max_error(speed(SupportField::constant(1.0, 32), weighted), [](double) { return 2.0; }) < 1e-14);
}

TEST_CASE("one step on a circle follows the radius ODE") {
  // R' = -R^{-5/7}, so R^{12/7} = 1 - 12 t / 7
  const FlowConfig cfg = small_config(64);
  const FlowState next = step(FlowState(SupportField::constant(1.0, 64)), cfg);
  const double exact = std::pow(1.0 - 12.0 * next.t / 7.0, 7.0 / 12.0);
  CHECK(next.t > 0.0);
  CHECK(next.step_index == 1);
  for (int i = 0; i < 64; ++i) CHECK(std::abs(next.s[i] - exact) < 1e-13);
}

TEST_CASE("a step keeps exact symmetry") {
  FlowConfig cfg = small_config(96);
  cfg.psi.sin_coeffs = {0.1, 0.02};
  FourierSpec spec = cosine_spec(1.0, {0.04, 0.01});
  spec.sin_coeffs = {0.02};
  FlowState st(synthesize(spec, 96));
  for (int k = 0; k < 5; ++k) st = step(st, cfg);
  for (int i = 0; i < 48; ++i) CHECK(st.s[i] == st.s[i + 48]);
}

TEST_CASE("area law over one step") {
  FlowConfig cfg = small_config(128);
  cfg.psi = cosine_spec(1.0, {0.2, -0.05});
  const SupportField s0 = synthesize(cosine_spec(1.0, {0.1, 0.02}), 128);
  const double a0 = geometry(s0).area;
  const double omega0 = p_affine_length(s0, cfg.p, cfg.weight_field());
  double defect[2];
  for (int pass = 0; pass < 2; ++pass) {
    FlowConfig c = cfg;
    c.dt_safety = pass == 0 ? 0.2 : 0.1;
    const FlowState next = step(FlowState(s0), c);
    defect[pass] = std::abs(geometry(next.s).area - a0 + omega0 * next.last_dt);
    CHECK(defect[pass] < 10.0 * next.last_dt * next.last_dt);
  }
  CHECK(defect[0] / defect[1] >= 3.5);
}

TEST_CASE("normalize rescales to area pi") {
  const FlowState big(SupportField::constant(2.0, 32));
  const FlowState n = normalize(big);
  CHECK(max_error(n.s.values(), [](double) { return 1.0; }) < 1e-15);
  CHECK(n.scale == doctest::Approx(0.5));

  const SupportField s = synthesize(cosine_spec(1.0, {0.1}), 64);
  const FlowState ns = normalize(FlowState(s));
  CHECK(std::abs(geometry(ns.s).area - kPi) < 1e-12);
  CHECK(ns.s[0] / s[0] == doctest::Approx(std::sqrt(1.0 / 0.985)).epsilon(1e-13));
  const FlowState twice = normalize(ns);
  CHECK(max_error(twice.s.values(), ns.s.values()) < 1e-15);
}

TEST_CASE("circle extinction") {
  const FlowConfig cfg = small_config(128);
  const SupportField circle = SupportField::constant(1.0, 128);
  const FlowTrace trace = run(cfg, circle);
  CHECK(trace.termination == Termination::Extinct);
  CHECK(trace.records.back().area < 0.01 * kPi);
  const auto est = extrapolate_extinction(trace, cfg.p);
  REQUIRE(est.has_value());
  CHECK(std::abs(*est - 7.0 / 12.0) < 0.01 * 7.0 / 12.0);
  CHECK(extinction_bound(circle, cfg) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(*est <= extinction_bound(circle, cfg));

  // homothetic solution
  const double r0 = trace.records.front().ratio;
  for (const FlowRecord& r : trace.records) CHECK(std::abs(r.ratio - r0) / r0 < 1e-9);
  const FlowState& last = *trace.final_state;
  CHECK(oscillation(last.s.values()) / spectral::mean(last.s.values()) < 1e-10);
}

TEST_CASE("extinction bound scales inversely with the weight") {
  const SupportField s = synthesize(cosine_spec(1.0, {0.05}), 64);
  FlowConfig a = small_config(64);
  a.psi = cosine_spec(1.0, {0.1});
  FlowConfig b = a;
  b.psi = cosine_spec(2.0, {0.2});
  CHECK(extinction_bound(s, b) == doctest::Approx(0.5 * extinction_bound(s, a)).epsilon(1e-13));
}

TEST_CASE("random runs are monotone, convex, and die before the bound") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> w(-0.2, 0.2);
  for (int i = 0; i < 4; ++i) {
    FlowConfig cfg = small_config(128);
    cfg.psi = cosine_spec(1.0, {w(rng), w(rng)});
    const SupportField s0 = synthesize(random_convex_spec(rng, 128), 128);
    const FlowTrace trace = run(cfg, s0);
    CHECK(trace.termination == Termination::Extinct);
    CHECK(check_monotone(trace).pass(1e-9));
    CHECK(trace.records.back().t <= extinction_bound(s0, cfg));
    for (double r : radius_of_curvature(trace.final_state->s)) CHECK(r > cfg.r_min);
  }
}

TEST_CASE("periodicity is preserved by the flow") {
  FlowConfig cfg = small_config(128);
  cfg.psi = cosine_spec(1.0, {0.0, 0.1});
  cfg.max_steps = 400;
  const SupportField s0 = synthesize(cosine_spec(1.0, {0.0, 0.02, 0.0, 0.004}), 128);
  double worst = 0.0;
  run(cfg, s0, [&](const FlowState& st, const FlowRecord&) {
    worst = std::max(worst, off_lattice_energy(st.s.values(), 2));
    return true;
  });
  CHECK(worst < 1e-9);
}

TEST_CASE("normalized runs keep area pi") {
  FlowConfig cfg = small_config(64);
  cfg.normalize = true;
  cfg.max_steps = 300;
  const FlowTrace trace = run(cfg, synthesize(cosine_spec(1.3, {0.05}), 64));
  for (const FlowRecord& r : trace.records) CHECK(std::abs(r.area - kPi) < 1e-10);
  CHECK(trace.records.back().residual_osc < trace.records.front().residual_osc);
}

TEST_CASE("unweighted normalized flow converges to an ellipse") {
  FlowConfig cfg = small_config(64);
  cfg.normalize = true;
  cfg.integrator = Integrator::RKC;
  cfg.stop_residual = 1e-8;
  const FlowTrace trace = run(cfg, synthesize(cosine_spec(1.0, {0.05, 0.01}), 64));
  CHECK(trace.termination == Termination::Converged);
  CHECK(trace.records.back().residual_osc <= 1e-8);
  const Field sigma = affine_support(trace.final_state->s);
  CHECK(oscillation(sigma) / spectral::mean(sigma) < 1e-7);
  const Field r = radius_of_curvature(trace.final_state->s);
  // r s^3 is constant on an ellipse
  Field rs3(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) rs3[i] = r[i] * std::pow(trace.final_state->s[static_cast<int>(i)], 3);
  CHECK(oscillation(rs3) / spectral::mean(rs3) < 1e-6);
}

TEST_CASE("RKC and RK4 agree on an unnormalized run") {
  FlowConfig rk4 = small_config(64);
  rk4.t_max = 0.2;
  FlowConfig rkc = rk4;
  rkc.integrator = Integrator::RKC;
  rkc.rkc_step_tolerance = 1e-4;
  const SupportField s0 = synthesize(cosine_spec(1.0, {0.05}), 64);
  const FlowTrace a = run(rk4, s0);
  const FlowTrace b = run(rkc, s0);
  CHECK(a.termination == Termination::TimeLimit);
  CHECK(b.termination == Termination::TimeLimit);
  const double ta = a.records.back().t, tb = b.records.back().t;
  CHECK(ta == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(tb == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(max_error(a.final_state->s.values(), b.final_state->s.values()) < 1e-6);
}

TEST_CASE("observer can stop a run") {
  const FlowTrace trace = run(small_config(32), SupportField::constant(1.0, 32),
                              [](const FlowState& st, const FlowRecord&) { return st.step_index < 5; });
  CHECK(trace.termination == Termination::Stopped);
  CHECK(trace.records.back().step == 5);
}

TEST_CASE("configuration validation") {
  FlowConfig cfg;
  cfg.p = 2.5;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("(1,2)"), ConfigError);
  cfg = FlowConfig{};
  cfg.n_samples = 30;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = FlowConfig{};
  cfg.dt_safety = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = FlowConfig{};
  cfg.stop_residual = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(run(cfg, SupportField::constant(1.0, 256)), ConfigError);
  CHECK_NOTHROW(FlowConfig{}.validate());
}

TEST_CASE("trace CSV") {
  const FlowTrace trace = run(small_config(16), SupportField::constant(1.0, 16),
                              [](const FlowState& st, const FlowRecord&) { return st.step_index < 3; });
  std::stringstream ss;
  write_trace_csv(ss, trace);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "step,t,tau,area,length,omega_p_psi,ratio,min_speed,residual_osc,aspect,dt");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == static_cast<int>(trace.records.size()));
}
