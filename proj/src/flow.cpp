#include "centroflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "centroflow/errors.hpp"

namespace centroflow {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

std::string fmt(const char* pattern, double v) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// Right-hand side F = -speed with the quantities every step needs.
struct Rhs {
  Field f;
  double dmax = 0.0;       // max linearized diffusivity q * speed / r
  double area = 0.0;
  double omega = 0.0;      // Omega_p^Psi
  double min_scale = 0.0;  // min s / speed
};

Rhs evaluate(const Field& y, const Field& psi, double q) {
  const int n = static_cast<int>(y.size());
  Field r = spectral::derivative(y, 2);
  Rhs out;
  out.f.resize(idx(n));
  out.min_scale = std::numeric_limits<double>::infinity();
  double sr = 0.0, sp_r = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t k = idx(i);
    const double ri = r[k] + y[k];
    if (!(ri > 0.0) || !(y[k] > 0.0)) throw NotConvex(i, ri);
    const double sp = psi[k] * std::exp((1.0 - 3.0 * q) * std::log(y[k]) - q * std::log(ri));
    out.f[k] = -sp;
    out.dmax = std::max(out.dmax, q * sp / ri);
    out.min_scale = std::min(out.min_scale, y[k] / sp);
    sr += y[k] * ri;
    sp_r += sp * ri;
  }
  const double w = kTwoPi / n;
  out.area = 0.5 * sr * w;
  out.omega = sp_r * w;
  return out;
}

void symmetrize(Field& y) {
  const std::size_t half = y.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double avg = 0.5 * (y[i] + y[i + half]);
    y[i] = avg;
    y[i + half] = avg;
  }
}

void axpy(Field& out, double a, const Field& x) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * x[i];
}

Field rk4(const Field& y, const Rhs& k1, double dt, const Field& psi, double q) {
  Field stage = y;
  axpy(stage, 0.5 * dt, k1.f);
  const Field k2 = evaluate(stage, psi, q).f;
  stage = y;
  axpy(stage, 0.5 * dt, k2);
  const Field k3 = evaluate(stage, psi, q).f;
  stage = y;
  axpy(stage, dt, k3);
  const Field k4 = evaluate(stage, psi, q).f;
  Field out = y;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += dt / 6.0 * (k1.f[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

// Second-order Runge-Kutta-Chebyshev step with damping 2/13.
Field rkc(const Field& y, const Rhs& f0, double h, int m, const Field& psi, double q) {
  const double eps = 2.0 / 13.0;
  const double w0 = 1.0 + eps / (static_cast<double>(m) * m);
  std::vector<double> t(idx(m + 1)), dt(idx(m + 1)), ddt(idx(m + 1));
  t[0] = 1.0;
  t[1] = w0;
  dt[1] = 1.0;
  for (int j = 2; j <= m; ++j) {
    const std::size_t k = idx(j);
    t[k] = 2.0 * w0 * t[k - 1] - t[k - 2];
    dt[k] = 2.0 * t[k - 1] + 2.0 * w0 * dt[k - 1] - dt[k - 2];
    ddt[k] = 4.0 * dt[k - 1] + 2.0 * w0 * ddt[k - 1] - ddt[k - 2];
  }
  const double w1 = dt[idx(m)] / ddt[idx(m)];
  std::vector<double> b(idx(m + 1));
  for (int j = 2; j <= m; ++j) b[idx(j)] = ddt[idx(j)] / (dt[idx(j)] * dt[idx(j)]);
  b[0] = b[1] = b[2];
  auto a = [&](int j) { return 1.0 - b[idx(j)] * t[idx(j)]; };

  Field prev2 = y;
  Field prev = y;
  axpy(prev, b[1] * w1 * h, f0.f);
  Field next(y.size());
  for (int j = 2; j <= m; ++j) {
    const std::size_t k = idx(j);
    const double mu = 2.0 * b[k] * w0 / b[k - 1];
    const double nu = -b[k] / b[k - 2];
    const double mu_t = 2.0 * b[k] * w1 / b[k - 1];
    const double gamma_t = -a(j - 1) * mu_t;
    const Field fj = evaluate(prev, psi, q).f;
    for (std::size_t i = 0; i < y.size(); ++i) {
      next[i] = (1.0 - mu - nu) * y[i] + mu * prev[i] + nu * prev2[i] + mu_t * h * fj[i] +
                gamma_t * h * f0.f[i];
    }
    std::swap(prev2, prev);
    std::swap(prev, next);
  }
  return prev;
}

// `dt_limit` caps the step in stored-curve time units.
FlowState advance(const FlowState& state, const FlowConfig& cfg, const Field& psi,
                  double dt_limit = std::numeric_limits<double>::infinity()) {
  const double q = cfg.p / (cfg.p + 2.0);
  const Field& y = state.s.field();
  const int n = static_cast<int>(y.size());
  const long next_step = state.step_index + 1;
  try {
    const Rhs f0 = evaluate(y, psi, q);
    const double cap = 0.05 * f0.area / f0.omega;
    double dt = 0.0;
    int stages = 4;
    Field out;
    if (cfg.integrator == Integrator::RK4) {
      const double h = kTwoPi / n;
      dt = std::min({cfg.dt_safety * h * h / f0.dmax, cap, dt_limit});
      out = rk4(y, f0, dt, psi, q);
    } else {
      const double half = 0.5 * n;
      const double rho = 1.1 * f0.dmax * half * half;
      dt = std::min({cap, cfg.rkc_step_tolerance * f0.min_scale, dt_limit});
      stages = static_cast<int>(std::ceil(1.0 + std::sqrt(1.0 + 1.54 * dt * rho)));
      stages = std::max(stages, 2);
      if (stages > cfg.rkc_max_stages) {
        stages = cfg.rkc_max_stages;
        const double mm = stages - 1.0;
        dt = (mm * mm - 1.0) / (1.54 * rho);
      }
      out = rkc(y, f0, dt, stages, psi, q);
    }
    symmetrize(out);

    Field r = spectral::derivative(out, 2);
    for (int i = 0; i < n; ++i) {
      const double ri = r[idx(i)] + out[idx(i)];
      if (!(ri > cfg.r_min) || !(out[idx(i)] > 0.0)) throw ConvexityLost(next_step, i, ri);
    }

    FlowState next(SupportField::from_samples(std::move(out)));
    const double true_dt = dt * std::pow(state.scale, -4.0 * q);
    next.t = state.t + true_dt;
    next.tau = state.tau + std::pow(std::numbers::pi / f0.area, 2.0 * q) * dt;
    next.step_index = next_step;
    next.last_dt = true_dt;
    next.last_stages = stages;
    next.scale = state.scale;
    return next;
  } catch (const NotConvex& e) {
    throw ConvexityLost(next_step, e.index(), e.radius());
  }
}

FlowRecord measure_with(const FlowState& state, const FlowConfig& cfg, const Field& psi) {
  const double p = cfg.p;
  const double q = p / (p + 2.0);
  const CurveGeometry g = geometry(state.s);
  const int n = state.s.size();
  FlowRecord rec;
  rec.step = state.step_index;
  rec.t = state.t;
  rec.tau = state.tau;
  rec.area = g.area;
  rec.length = g.length;
  rec.dt = state.last_dt;

  Field integrand(idx(n)), log_ratio(idx(n));
  double min_speed = std::numeric_limits<double>::infinity();
  const double expo = (p + 2.0) / (3.0 * p);
  for (int i = 0; i < n; ++i) {
    const std::size_t k = idx(i);
    const double s = state.s[i];
    const double r = g.radius_of_curvature[k];
    const double sp = psi[k] * std::pow(s, 1.0 - 3.0 * q) * std::pow(r, -q);
    min_speed = std::min(min_speed, sp);
    integrand[k] = sp * r;
    log_ratio[k] = expo * std::log(psi[k]) - std::log(s * std::cbrt(r));
  }
  rec.omega_p_psi = spectral::integrate(integrand);
  rec.ratio = rec.omega_p_psi / std::pow(g.area, (2.0 - p) / (2.0 + p));
  rec.min_speed = min_speed * std::pow(state.scale, -(1.0 - 4.0 * q));
  rec.residual_osc = oscillation(log_ratio);
  const auto [lo, hi] = std::minmax_element(state.s.field().begin(), state.s.field().end());
  rec.aspect = *hi / *lo;
  return rec;
}

}  // namespace

const char* to_string(Integrator integrator) {
  return integrator == Integrator::RK4 ? "rk4" : "rkc";
}

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::Converged: return "converged";
    case Termination::TimeLimit: return "time_limit";
    case Termination::StepLimit: return "step_limit";
    case Termination::AspectExceeded: return "aspect_exceeded";
    case Termination::ConvexityLost: return "convexity_lost";
    case Termination::Extinct: return "extinct";
    case Termination::Stopped: return "stopped";
  }
  return "unknown";
}

void FlowConfig::validate() const {
  if (!(p > 1.0 && p < 2.0)) throw ConfigError(fmt("p must lie in the open interval (1,2); got %.17g", p));
  if (n_samples < 8 || n_samples % 4 != 0) {
    throw ConfigError("n_samples must be a multiple of 4 and at least 8; got " + std::to_string(n_samples));
  }
  if (psi_samples.empty()) {
    if (!(n_samples > 4 * psi.harmonics())) {
      throw ConfigError("n_samples must exceed 4 times the number of weight harmonics");
    }
  } else if (static_cast<int>(psi_samples.size()) != n_samples) {
    throw ConfigError("weight samples must have n_samples entries");
  }
  for (double v : weight_field()) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("weight psi must be positive on the grid");
  }
  if (!(dt_safety > 0.0 && dt_safety <= 0.28)) {
    throw ConfigError(fmt("dt_safety must lie in (0, 0.28] for RK4 stability; got %.17g", dt_safety));
  }
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  if (max_steps <= 0) throw ConfigError("max_steps must be positive");
  if (!(stop_residual > 0.0)) throw ConfigError("stop_residual must be positive");
  if (!(aspect_max > 1.0)) throw ConfigError("aspect_max must exceed 1");
  if (!(r_min > 0.0)) throw ConfigError("r_min must be positive");
  if (!(extinction_area_fraction > 0.0 && extinction_area_fraction < 1.0)) {
    throw ConfigError("extinction_area_fraction must lie in (0,1)");
  }
  if (record_every < 1) throw ConfigError("record_every must be at least 1");
  if (!(rkc_step_tolerance > 0.0)) throw ConfigError("rkc_step_tolerance must be positive");
  if (rkc_max_stages < 2) throw ConfigError("rkc_max_stages must be at least 2");
}

Field FlowConfig::weight_field() const {
  if (!psi_samples.empty()) return psi_samples;
  return sample(psi, n_samples);
}

Field speed(const SupportField& s, const FlowConfig& cfg) {
  const double q = cfg.p / (cfg.p + 2.0);
  const Field psi = cfg.weight_field();
  if (static_cast<int>(psi.size()) != s.size()) throw InvalidGrid("weight and curve grids differ");
  Field out = evaluate(s.field(), psi, q).f;
  for (double& v : out) v = -v;
  return out;
}

FlowState step(const FlowState& state, const FlowConfig& cfg) {
  const Field psi = cfg.weight_field();
  if (static_cast<int>(psi.size()) != state.s.size()) throw InvalidGrid("weight and curve grids differ");
  return advance(state, cfg, psi);
}

FlowState normalize(const FlowState& state) {
  const double lambda = std::sqrt(std::numbers::pi / geometry(state.s).area);
  FlowState out = state;
  out.s = state.s.scaled(lambda);
  out.scale = state.scale * lambda;
  return out;
}

FlowRecord measure(const FlowState& state, const FlowConfig& cfg) {
  return measure_with(state, cfg, cfg.weight_field());
}

FlowTrace run(const FlowConfig& cfg, const SupportField& initial, const FlowObserver& observer) {
  cfg.validate();
  if (initial.size() != cfg.n_samples) throw ConfigError("initial curve does not have n_samples nodes");
  const Field psi = cfg.weight_field();
  FlowTrace trace;
  FlowState state(initial);
  geometry(initial);
  if (cfg.normalize) state = normalize(state);
  const double area0 = geometry(initial).area;

  auto finished = [&](const FlowRecord& rec) -> std::optional<Termination> {
    if (cfg.normalize && rec.residual_osc < cfg.stop_residual) return Termination::Converged;
    if (rec.aspect > cfg.aspect_max) return Termination::AspectExceeded;
    if (!cfg.normalize && rec.area < cfg.extinction_area_fraction * area0) return Termination::Extinct;
    if ((cfg.normalize ? rec.tau : rec.t) >= cfg.t_max) return Termination::TimeLimit;
    if (rec.step >= cfg.max_steps) return Termination::StepLimit;
    return std::nullopt;
  };

  FlowRecord rec = measure_with(state, cfg, psi);
  trace.records.push_back(rec);
  if (observer && !observer(state, rec)) {
    trace.termination = Termination::Stopped;
    trace.final_state = state;
    return trace;
  }
  std::optional<Termination> done = finished(rec);
  while (!done) {
    // land on t_max; a normalized curve has area pi, so d(tau) = dt
    const double left = cfg.t_max - (cfg.normalize ? state.tau : state.t);
    try {
      state = advance(state, cfg, psi, left);
    } catch (const ConvexityLost& e) {
      done = Termination::ConvexityLost;
      trace.detail = e.what();
      if (trace.records.back().step != rec.step) trace.records.push_back(rec);
      break;
    }
    if (cfg.normalize) state = normalize(state);
    rec = measure_with(state, cfg, psi);
    done = finished(rec);
    if (observer && !observer(state, rec)) done = Termination::Stopped;
    if (done || rec.step % cfg.record_every == 0) trace.records.push_back(rec);
  }
  trace.termination = *done;
  trace.final_state = state;
  return trace;
}

double extinction_bound(const SupportField& initial, const FlowConfig& cfg) {
  const Field sp = speed(initial, cfg);
  const double delta = *std::min_element(sp.begin(), sp.end());
  return std::sqrt(geometry(initial).area) / (delta * std::sqrt(std::numbers::pi));
}

std::optional<double> extrapolate_extinction(const FlowTrace& trace, double p) {
  if (trace.records.size() < 2) return std::nullopt;
  const FlowRecord& a = trace.records[trace.records.size() - 2];
  const FlowRecord& b = trace.records.back();
  const double expo = 2.0 * p / (p + 2.0);
  const double ya = std::pow(a.area, expo);
  const double yb = std::pow(b.area, expo);
  if (!(ya > yb) || !(b.t > a.t)) return std::nullopt;
  return b.t + yb * (b.t - a.t) / (ya - yb);
}

MonotoneCheck check_monotone(const FlowTrace& trace) {
  MonotoneCheck check;
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    const FlowRecord& a = trace.records[i - 1];
    const FlowRecord& b = trace.records[i];
    const double ds = (b.min_speed - a.min_speed) / std::max(1.0, std::abs(a.min_speed));
    const double dr = (b.ratio - a.ratio) / std::max(1.0, std::abs(a.ratio));
    if (ds < check.worst_min_speed_drop) {
      check.worst_min_speed_drop = ds;
      check.min_speed_step = b.step;
    }
    if (dr < check.worst_ratio_drop) {
      check.worst_ratio_drop = dr;
      check.ratio_step = b.step;
    }
  }
  return check;
}

void write_trace_csv(std::ostream& os, const FlowTrace& trace) {
  os << "step,t,tau,area,length,omega_p_psi,ratio,min_speed,residual_osc,aspect,dt\n";
  char line[512];
  for (const FlowRecord& r : trace.records) {
    std::snprintf(line, sizeof line,
                  "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, r.t,
                  r.tau, r.area, r.length, r.omega_p_psi, r.ratio, r.min_speed, r.residual_osc,
                  r.aspect, r.dt);
    os << line;
  }
}

}  // namespace centroflow
