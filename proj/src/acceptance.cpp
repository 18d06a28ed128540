#include "centroflow/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

#include "centroflow/affine.hpp"
#include "centroflow/curve.hpp"
#include "centroflow/errors.hpp"
#include "centroflow/flow.hpp"
#include "centroflow/obstruction.hpp"
#include "centroflow/shapes.hpp"
#include "centroflow/solver.hpp"

namespace centroflow::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

std::string printf_string(const char* pattern, ...) {
  char buf[1024];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

FourierSpec spec_of(double a0, std::vector<double> cos_coeffs) {
  FourierSpec s;
  s.a0 = a0;
  s.cos_coeffs = std::move(cos_coeffs);
  return s;
}

// Criterion 5's solve, shared with criterion 7.
struct RoundTrip {
  SupportField generator;
  TargetData target;
  SolveReport report;
};

const RoundTrip& round_trip() {
  static std::once_flag once;
  static std::optional<RoundTrip> cached;
  std::call_once(once, [] {
    const int n = 256;
    SupportField gen = synthesize(spec_of(1.0, {0.0, 0.05}), n);
    TargetData target = make_target(forward(gen), 1.5);
    SolveReport report = solve(target, default_solve_config());
    cached.emplace(RoundTrip{std::move(gen), std::move(target), std::move(report)});
  });
  return *cached;
}

Result circle_extinction() {
  FlowConfig cfg;
  cfg.p = 1.5;
  cfg.n_samples = 128;
  const SupportField circle = SupportField::constant(1.0, cfg.n_samples);
  const FlowTrace trace = run(cfg, circle);
  const double exact = (cfg.p + 2.0) / (4.0 * cfg.p);
  const double est = extrapolate_extinction(trace, cfg.p).value_or(NAN);
  const double bound = extinction_bound(circle, cfg);
  const double rel = std::abs(est - exact) / exact;
  const bool pass = trace.termination == Termination::Extinct && rel < 0.01 && est <= bound &&
                    std::abs(bound - 1.0) < 1e-12;
  return {1, "circle extinction", pass,
          printf_string("T_est=%.6f exact=%.6f rel_err=%.2e (<1e-2) bound=%.6f steps=%ld", est, exact, rel,
                        bound, trace.records.back().step)};
}

Result area_law() {
  FlowConfig cfg;
  cfg.p = 1.5;
  cfg.n_samples = 128;
  cfg.psi = spec_of(1.0, {0.2, -0.05});
  const SupportField s0 = synthesize(spec_of(1.0, {0.1, 0.02}), cfg.n_samples);
  const Field psi = cfg.weight_field();
  const double a0 = geometry(s0).area;
  const double omega0 = p_affine_length(s0, cfg.p, psi);

  double rel_err = 0.0;
  double defect[2] = {0.0, 0.0};
  for (int pass = 0; pass < 2; ++pass) {
    FlowConfig c = cfg;
    c.dt_safety = pass == 0 ? 0.2 : 0.1;
    const FlowState next = step(FlowState(s0), c);
    const double dt = next.last_dt;
    const double a1 = geometry(next.s).area;
    const double omega1 = p_affine_length(next.s, cfg.p, psi);
    const double fd = (a1 - a0) / dt;
    if (pass == 0) rel_err = std::abs(fd + 0.5 * (omega0 + omega1)) / omega0;
    defect[pass] = std::abs(a1 - a0 + omega0 * dt);
  }
  const double ratio = defect[0] / defect[1];
  const bool pass = rel_err < 1e-4 && ratio >= 3.5;
  return {2, "area law dA/dt = -Omega_p^Psi", pass,
          printf_string("fd_rel_err=%.2e (<1e-4) defect=%.3e halved=%.3e ratio=%.2f (>=3.5)", rel_err,
                        defect[0], defect[1], ratio)};
}

Result monotonicity(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(-0.2, 0.2);
  double worst_speed = 0.0, worst_ratio = 0.0;
  int failures = 0;
  long total_steps = 0;
  for (int i = 0; i < 20; ++i) {
    const FourierSpec spec = random_convex_spec(rng, 128);
    for (int varying = 0; varying < 2; ++varying) {
      FlowConfig cfg;
      cfg.p = 1.5;
      cfg.n_samples = 128;
      cfg.max_steps = 50000;
      if (varying == 1) cfg.psi = spec_of(1.0, {weight(rng), weight(rng)});
      const FlowTrace trace = run(cfg, synthesize(spec, cfg.n_samples));
      const MonotoneCheck m = check_monotone(trace);
      worst_speed = std::min(worst_speed, m.worst_min_speed_drop);
      worst_ratio = std::min(worst_ratio, m.worst_ratio_drop);
      total_steps += trace.records.back().step;
      if (!m.pass(1e-9) || trace.termination != Termination::Extinct) ++failures;
    }
  }

  FlowConfig cfg;
  cfg.n_samples = 128;
  const FlowTrace circle = run(cfg, SupportField::constant(1.0, cfg.n_samples));
  const double r0 = circle.records.front().ratio;
  double ratio_drift = 0.0;
  for (const FlowRecord& r : circle.records) ratio_drift = std::max(ratio_drift, std::abs(r.ratio - r0) / r0);
  const FlowState& last = *circle.final_state;
  const double roundness = oscillation(last.s.values()) / spectral::mean(last.s.values());
  const bool pass = failures == 0 && ratio_drift < 1e-9 && roundness < 1e-10;
  return {3, "monotone min speed and weighted ratio", pass,
          printf_string("40 runs, %ld steps, failures=%d, worst d(min_speed)=%.2e worst d(ratio)=%.2e "
                        "(>=-1e-9); circle ratio drift=%.2e (<1e-9) osc/mean=%.2e",
                        total_steps, failures, worst_speed, worst_ratio, ratio_drift, roundness)};
}

Result affine_battery(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 4);
  const int n = 256;
  double identity = 0.0, embedded = 0.0, kappa = 0.0, mu = 0.0, closure = 0.0, isoperimetric = -INFINITY;
  for (int i = 0; i < 50; ++i) {
    const SupportField s = synthesize(random_convex_spec(rng, n), n);
    const AffineData a = affine_data(s, 1.5);
    const Field sigma_ss = affine_derivative(a.sigma, s, 2);
    const Field mu_embed = affine_curvature_from_embedding(s);
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(j);
      identity = std::max(identity, std::abs(sigma_ss[k] + a.sigma[k] * a.mu[k] - 1.0));
      embedded = std::max(embedded, std::abs(mu_embed[k] - a.mu[k]) / std::max(1.0, std::abs(a.mu[k])));
    }
    const LambdaCurve lc = lambda_curve(s);
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(j);
      kappa = std::max(kappa, std::abs(lc.euclid_curvature[k] - s[j] * s[j] * s[j]));
      mu = std::max(mu, std::abs(lc.affine_curvature[k] - a.sigma[k] * a.sigma[k] * a.sigma[k]));
    }
    closure = std::max(closure, lc.closure_defect);
    const double area = geometry(s).area;
    for (double p : {1.1, 1.5, 1.9}) {
      const double lhs = std::pow(p_affine_length(s, p), 2.0 + p);
      const double rhs = std::pow(2.0, 2.0 + p) * std::pow(kPi, 2.0 * p) * std::pow(area, 2.0 - p);
      isoperimetric = std::max(isoperimetric, lhs / rhs - 1.0);
    }
  }
  double ellipse_gap = 0.0;
  for (auto [a, b] : {std::pair{2.0, 0.5}, std::pair{1.0, 1.0}, std::pair{1.5, 0.8}}) {
    const SupportField e = ellipse(a, b, n);
    const double area = geometry(e).area;
    for (double p : {1.1, 1.5, 1.9}) {
      const double lhs = std::pow(p_affine_length(e, p), 2.0 + p);
      const double rhs = std::pow(2.0, 2.0 + p) * std::pow(kPi, 2.0 * p) * std::pow(area, 2.0 - p);
      ellipse_gap = std::max(ellipse_gap, std::abs(lhs / rhs - 1.0));
    }
  }
  const bool pass = identity < 1e-8 && kappa < 1e-6 && mu < 1e-6 && closure < 1e-10 &&
                    isoperimetric <= 0.0 && ellipse_gap < 1e-8;
  return {4, "affine identities", pass,
          printf_string("sigma_ss+sigma*mu-1=%.2e (<1e-8) kappa_L-s^3=%.2e mu_L-sigma^3=%.2e (<1e-6) "
                        "closure=%.2e (<1e-10) max(Omega/bound-1)=%.2e (<=0) ellipse gap=%.2e (<1e-8); "
                        "info: embedding mu rel diff=%.1e",
                        identity, kappa, mu, closure, isoperimetric, ellipse_gap, embedded)};
}

Result round_trip_solve() {
  const RoundTrip& rt = round_trip();
  const SolveReport& r = rt.report;
  const double match = max_abs_diff(r.best_s.values(), rt.generator.values());
  const double recomputed = max_abs_diff(forward(r.best_s), rt.target.phi);
  const bool pass = r.status == SolveStatus::Converged && r.residual_osc < 1e-6 && recomputed < 1e-3 &&
                    match < 1e-3;
  return {5, "round-trip Minkowski solve (k=2)", pass,
          printf_string("status=%s steps=%ld residual_osc=%.2e (<1e-6) residual_sup=%.2e (<1e-3) "
                        "|s-s*|=%.2e (<1e-3)",
                        to_string(r.status), r.n_steps, r.residual_osc, recomputed, match)};
}

Result approximating_family() {
  const int n = 256;
  const TargetData target = make_target(sample(spec_of(2.0, {1.0}), n), 1.5);
  const SolveReport r = solve(target, default_solve_config());
  double min_snapshot = INFINITY;
  for (const Snapshot& s : r.snapshots) min_snapshot = std::min(min_snapshot, s.residual_sup);
  const NecessaryCondition nc = necessary_condition(target.phi);
  const bool pass = min_snapshot < 0.05 && r.final_aspect > 10.0 &&
                    r.status == SolveStatus::ApproximatingFamily && !nc.critical.degenerate &&
                    nc.critical.count == 4 && !nc.pass;
  return {6, "approximating family for 2+cos2theta", pass,
          printf_string("status=%s min snapshot residual_sup=%.4f (<0.05) residual_osc=%.4f final aspect=%.1f "
                        "(>10) steps=%ld critical=%d necessary=%s",
                        to_string(r.status), min_snapshot, r.residual_osc, r.final_aspect, r.n_steps,
                        nc.critical.count, nc.pass ? "pass" : "fail")};
}

Result obstruction_closed_forms() {
  const int n = 256;
  const Field phi = sample(spec_of(2.0, {1.0}), n);
  const Field b = b_field(phi, 2048);
  double b_err = 0.0;
  for (int i = 0; i < n / 2; ++i) {
    const double x = grid_angle(i, n);
    b_err = std::max(b_err, std::abs(b[static_cast<std::size_t>(i)] + 2.0 * kPi * std::cos(2.0 * x)));
  }
  for (double x : {0.0, 0.3, 1.1, 2.0, 2.9}) {
    b_err = std::max(b_err, std::abs(b_functional(phi, x, 2048) + 2.0 * kPi * std::cos(2.0 * x)));
  }
  const int winding = winding_number(phi);

  const Field constant(static_cast<std::size_t>(n), 1.7);
  double b_const = 0.0;
  for (double v : b_field(constant)) b_const = std::max(b_const, std::abs(v));
  double kw_const = 0.0;
  for (double v : kazdan_warner(constant, SupportField::constant(1.0, n))) kw_const = std::max(kw_const, std::abs(v));

  const RoundTrip& rt = round_trip();
  double kw_solution = 0.0;
  for (double v : kazdan_warner(rt.target.phi, rt.report.best_s)) kw_solution = std::max(kw_solution, std::abs(v));

  const bool pass = b_err < 1e-6 && winding == -1 && b_const < 1e-12 && kw_const < 1e-12 && kw_solution < 1e-4;
  return {7, "obstruction closed forms", pass,
          printf_string("|B+2pi cos2x|=%.2e (<1e-6) winding=%d (-1) const B=%.1e const KW=%.1e (<1e-12) "
                        "KW(solution)=%.2e (<1e-4)",
                        b_err, winding, b_const, kw_const, kw_solution)};
}

Result eight_critical_points(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 8);
  const int n = 256;
  int tested = 0, worst = 1 << 30, failures = 0;
  while (tested < 50) {
    const SupportField s = synthesize(random_convex_spec(rng, n), n);
    const CriticalPoints cp = count_critical_points(affine_support(s));
    if (cp.degenerate) continue;
    ++tested;
    worst = std::min(worst, cp.count);
    if (cp.count < 8) ++failures;
  }
  return {8, "eight critical points of sigma", failures == 0,
          printf_string("50 curves, min count=%d (>=8), failures=%d", worst, failures)};
}

Result john_bounds_periodicity(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 9);
  const int n = 128;
  const JohnBounds jb = john_bounds(2);
  double lo = INFINITY, hi = 0.0, worst_ratio = 0.0;
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const SupportField s = normalized_area(synthesize(random_convex_spec(rng, n, 2), n));
    const auto [mn, mx] = std::minmax_element(s.values().begin(), s.values().end());
    lo = std::min(lo, *mn);
    hi = std::max(hi, *mx);
    const CoefficientBoundCheck c = fourier_coefficient_bound_check(s, 2);
    worst_ratio = std::max(worst_ratio, c.worst_ratio);
    if (*mn < jb.s_lower || *mx > jb.s_upper || !c.pass) ++failures;
  }

  double off_lattice = 0.0;
  for (int k : {2, 3}) {
    FlowConfig cfg;
    cfg.n_samples = n;
    cfg.normalize = true;
    cfg.max_steps = 3000;
    cfg.psi.cos_coeffs.assign(static_cast<std::size_t>(k), 0.0);
    cfg.psi.cos_coeffs[static_cast<std::size_t>(k - 1)] = 0.1;
    const SupportField s0 = synthesize(random_convex_spec(rng, n, k), n);
    run(cfg, s0, [&](const FlowState& st, const FlowRecord&) {
      off_lattice = std::max(off_lattice, off_lattice_energy(st.s.values(), k));
      return true;
    });
  }
  const bool pass = failures == 0 && off_lattice < 1e-9;
  return {9, "John bounds and periodicity", pass,
          printf_string("100 curves: min s=%.4f (>=%.4f) max s=%.4f (<=%.4f) worst coef ratio=%.3f (<=1) "
                        "failures=%d; off-lattice energy k=2,3 max=%.2e (<1e-9)",
                        lo, jb.s_lower, hi, jb.s_upper, worst_ratio, failures, off_lattice)};
}

// Relative size of the top quarter of the spectrum.
double spectral_tail(std::span<const double> f) {
  const auto c = spectral::analyze(f);
  double peak = 0.0, tail = 0.0;
  for (const auto& v : c) peak = std::max(peak, std::abs(v));
  for (std::size_t m = c.size() * 3 / 4; m < c.size(); ++m) tail = std::max(tail, std::abs(c[m]));
  return tail / peak;
}

Result sl2_equivariance(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 10);
  double area_err = 0.0, omega_err = 0.0, phi_err = 0.0;
  int finest = 0;
  for (int i = 0; i < 20; ++i) {
    const LinearMap2 t = random_sl2(rng);
    const FourierSpec spec = random_convex_spec(rng, 512);
    // Refine until the transformed curve's sigma is resolved.
    for (int n = 512;; n *= 2) {
      const SupportField s = synthesize(spec, n);
      const SL2Orbit orbit = sl2_solution_orbit(s, t);
      const Field sigma_t = forward(orbit.s);
      if (spectral_tail(sigma_t) > 1e-13 && n < 16384) continue;
      finest = std::max(finest, n);
      const double a0 = geometry(s).area;
      const double a1 = geometry(orbit.s).area;
      area_err = std::max(area_err, std::abs(a1 - a0) / a0);
      const double o0 = p_affine_length(s, 1.5);
      const double o1 = p_affine_length(orbit.s, 1.5);
      omega_err = std::max(omega_err, std::abs(o1 - o0) / o0);
      phi_err = std::max(phi_err, max_abs_diff(sigma_t, orbit.phi));
      break;
    }
  }
  const bool pass = area_err < 1e-7 && omega_err < 1e-7 && phi_err < 1e-6;
  return {10, "SL(2) equivariance", pass,
          printf_string("20 maps (N up to %d): area rel=%.2e omega_p rel=%.2e (<1e-7) "
                        "|forward(T s)-Phi_T|=%.2e (<1e-6)",
                        finest, area_err, omega_err, phi_err)};
}

}  // namespace

Result run_criterion(int id, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  Result r;
  try {
    switch (id) {
      case 1: r = circle_extinction(); break;
      case 2: r = area_law(); break;
      case 3: r = monotonicity(seed); break;
      case 4: r = affine_battery(seed); break;
      case 5: r = round_trip_solve(); break;
      case 6: r = approximating_family(); break;
      case 7: r = obstruction_closed_forms(); break;
      case 8: r = eight_critical_points(seed); break;
      case 9: r = john_bounds_periodicity(seed); break;
      case 10: r = sl2_equivariance(seed); break;
      default: throw OutOfRange("no acceptance criterion " + std::to_string(id));
    }
  } catch (const Error& e) {
    r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string format(const Result& r) {
  return printf_string("%s criterion %2d %-42s %7.2fs  %s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                       r.seconds, r.detail.c_str());
}

std::vector<Result> run_all(std::ostream& log, const std::vector<int>& ids, std::uint64_t seed) {
  std::vector<int> todo = ids;
  if (todo.empty()) {
    for (int i = 1; i <= kCriteria; ++i) todo.push_back(i);
  }
  std::vector<Result> results;
  for (int id : todo) {
    results.push_back(run_criterion(id, seed));
    log << format(results.back()) << std::endl;
  }
  return results;
}

}  // namespace centroflow::acceptance
