#include "centroflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "centroflow/affine.hpp"
#include "centroflow/errors.hpp"

namespace centroflow {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double log_residual(std::span<const double> sigma, std::span<const double> phi) {
  Field v(sigma.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::log(phi[i] / sigma[i]);
  return oscillation(v);
}

}  // namespace

TargetData make_target(Field phi, double p) {
  require_flow_exponent(p);
  const int n = static_cast<int>(phi.size());
  if (n < 8 || n % 4 != 0) throw InvalidGrid("target grid size must be a multiple of 4 and at least 8");
  double scale = 0.0;
  for (double v : phi) {
    if (!(v > 0.0) || !std::isfinite(v)) throw OutOfRange("target Phi must be positive and finite");
    scale = std::max(scale, v);
  }
  for (int i = 0; i < n / 2; ++i) {
    if (std::abs(phi[idx(i)] - phi[idx(i + n / 2)]) > 1e-12 * scale) {
      throw InvalidGrid("target Phi is not pi-periodic");
    }
  }
  TargetData t;
  t.p = p;
  t.k = detect_periodicity(phi);
  t.psi.resize(phi.size());
  const double expo = 3.0 * p / (p + 2.0);
  for (std::size_t i = 0; i < phi.size(); ++i) t.psi[i] = std::pow(phi[i], expo);
  t.phi = std::move(phi);
  return t;
}

Field forward(const SupportField& s) { return affine_support(s); }

Calibration calibrate_scale(std::span<const double> sigma, std::span<const double> phi) {
  if (sigma.size() != phi.size() || sigma.empty()) throw InvalidGrid("sigma and Phi grids differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0) || !(phi[i] > 0.0)) throw OutOfRange("calibration needs positive fields");
    acc += std::log(phi[i]) - std::log(sigma[i]);
  }
  Calibration c;
  c.lambda_star = std::exp(0.75 * acc / static_cast<double>(sigma.size()));
  const double gain = std::pow(c.lambda_star, 4.0 / 3.0);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    c.residual_sup = std::max(c.residual_sup, std::abs(gain * sigma[i] - phi[i]));
  }
  return c;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::ApproximatingFamily: return "ApproximatingFamily";
    case SolveStatus::Halted: return "Halted";
  }
  return "unknown";
}

FlowConfig default_solve_config() {
  FlowConfig cfg;
  cfg.n_samples = 256;
  cfg.normalize = true;
  cfg.integrator = Integrator::RKC;
  cfg.max_steps = 400000;
  return cfg;
}

SupportField seed_curve(int k, int n_samples) {
  if (k < 2 || k == kUnboundedPeriodicity || 2 * k >= n_samples / 2) {
    return SupportField::constant(1.0, n_samples);
  }
  FourierSpec spec;
  spec.cos_coeffs.assign(idx(k), 0.0);
  const double lattice = 4.0 * k * k - 1.0;
  spec.cos_coeffs[idx(k - 1)] = std::min(0.01, 0.5 / lattice);
  return synthesize(spec, n_samples);
}

SolveReport solve(const TargetData& target, FlowConfig cfg) {
  cfg.p = target.p;
  cfg.psi_samples = target.psi;
  cfg.n_samples = static_cast<int>(target.phi.size());
  cfg.normalize = true;
  cfg.validate();

  const SupportField seed = seed_curve(target.k, cfg.n_samples);
  constexpr std::size_t kMaxSnapshots = 32;
  std::vector<Snapshot> snapshots;
  std::optional<Snapshot> best;
  double best_lambda = 1.0;
  double initial_residual = std::numeric_limits<double>::infinity();

  auto observe = [&](const FlowState& state, const FlowRecord& rec) {
    const Field sigma = affine_support(state.s);
    const Calibration cal = calibrate_scale(sigma, target.phi);
    if (state.step_index == 0) initial_residual = cal.residual_sup;
    if (best && !(cal.residual_sup < best->residual_sup)) return true;
    best = Snapshot{rec.step, rec.t, rec.tau, cal.residual_sup, rec.residual_osc, rec.aspect,
                    state.s.scaled(cal.lambda_star)};
    best_lambda = cal.lambda_star;
    if (snapshots.size() < kMaxSnapshots &&
        (snapshots.empty() || cal.residual_sup <= 0.1 * snapshots.back().residual_sup)) {
      snapshots.push_back(*best);
    }
    return true;
  };

  FlowTrace trace = run(cfg, seed, observe);
  if (snapshots.empty() || best->residual_sup < snapshots.back().residual_sup) {
    if (snapshots.size() == kMaxSnapshots) snapshots.pop_back();
    snapshots.push_back(*best);
  }

  // Certify from best_s alone.
  const Field sigma = affine_support(best->s);
  SolveStatus status = SolveStatus::Halted;
  if (trace.termination == Termination::Converged) {
    status = SolveStatus::Converged;
  } else if (trace.termination == Termination::AspectExceeded && best->residual_sup < initial_residual) {
    status = SolveStatus::ApproximatingFamily;
  }
  const double final_aspect = trace.records.empty() ? 1.0 : trace.records.back().aspect;
  const long n_steps = trace.final_state ? trace.final_state->step_index : 0;
  std::string detail = trace.detail.empty() ? to_string(trace.termination) : trace.detail;
  return SolveReport{.status = status,
                     .best_s = best->s,
                     .residual_sup = sup_distance(sigma, target.phi),
                     .residual_osc = log_residual(sigma, target.phi),
                     .lambda_star = best_lambda,
                     .k = target.k,
                     .p = target.p,
                     .n_steps = n_steps,
                     .final_aspect = final_aspect,
                     .detail = std::move(detail),
                     .trace = std::move(trace),
                     .snapshots = std::move(snapshots)};
}

Field transform_target(std::span<const double> phi, const LinearMap2& t) {
  if (!(std::abs(t.det() - 1.0) <= kSl2Tolerance)) throw InvalidMap(t.det());
  const int n = static_cast<int>(phi.size());
  const spectral::Interpolant interp(phi);
  const LinearMap2 tt = t.transpose();
  Field out(idx(n));
  for (int i = 0; i < n; ++i) {
    const double th = grid_angle(i, n);
    const Point2 w = tt.apply({std::cos(th), std::sin(th)});
    out[idx(i)] = interp(std::atan2(w[1], w[0]));
  }
  return out;
}

SL2Orbit sl2_solution_orbit(const SupportField& s, const LinearMap2& t) {
  return SL2Orbit{t, apply_sl2(s, t), transform_target(forward(s), t)};
}

}  // namespace centroflow
