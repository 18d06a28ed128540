#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "centroflow/curve.hpp"

namespace centroflow {

enum class Integrator { RK4, RKC };

const char* to_string(Integrator integrator);

struct FlowConfig {
  double p = 1.5;
  FourierSpec psi;           // weight; a0 = 1 gives the unweighted flow
  Field psi_samples;         // when non-empty, overrides `psi` (length N)
  int n_samples = 256;
  double dt_safety = 0.2;
  double t_max = std::numeric_limits<double>::infinity();  // bounds t, or tau when normalizing
  long max_steps = 200000;
  bool normalize = false;
  double stop_residual = 1e-6;  // only consulted when normalizing
  double aspect_max = 50.0;
  double r_min = 1e-6;
  double extinction_area_fraction = 0.01;  // unnormalized runs stop below this fraction of A(0)
  int record_every = 1;
  Integrator integrator = Integrator::RK4;
  double rkc_step_tolerance = 2e-3;
  int rkc_max_stages = 1000;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
  /// Psi on the N-point grid.
  Field weight_field() const;
};

struct FlowState {
  SupportField s;
  double t = 0.0;
  double tau = 0.0;
  long step_index = 0;
  double last_dt = 0.0;
  int last_stages = 0;
  /// Accumulated normalization factor; the unnormalized curve is s / scale.
  double scale = 1.0;

  explicit FlowState(SupportField initial) : s(std::move(initial)) {}
};

struct FlowRecord {
  long step = 0;
  double t = 0.0;
  double tau = 0.0;
  double area = 0.0;
  double length = 0.0;
  double omega_p_psi = 0.0;
  double ratio = 0.0;
  double min_speed = 0.0;
  double residual_osc = 0.0;
  double aspect = 0.0;
  double dt = 0.0;
};

enum class Termination { Converged, TimeLimit, StepLimit, AspectExceeded, ConvexityLost, Extinct, Stopped };

const char* to_string(Termination termination);

struct FlowTrace {
  std::vector<FlowRecord> records;
  Termination termination = Termination::StepLimit;
  std::string detail;
  std::optional<FlowState> final_state;
};

/// Pointwise Psi s^{1-3q} r^{-q}, q = p/(p+2). Throws NotConvex.
Field speed(const SupportField& s, const FlowConfig& cfg);

/// One accepted step of s_t = -speed. Throws ConvexityLost.
FlowState step(const FlowState& state, const FlowConfig& cfg);

/// Rescales to area pi; t and tau are unchanged.
FlowState normalize(const FlowState& state);

/// Diagnostics of a state as they appear in the trace.
FlowRecord measure(const FlowState& state, const FlowConfig& cfg);

/// Called after every accepted step with the new state and its record;
/// returning false ends the run with Termination::Stopped.
using FlowObserver = std::function<bool(const FlowState&, const FlowRecord&)>;

FlowTrace run(const FlowConfig& cfg, const SupportField& initial, const FlowObserver& observer = {});

/// sqrt(A(0)) / (delta sqrt(pi)), delta = min initial speed.
double extinction_bound(const SupportField& initial, const FlowConfig& cfg);

/// Extinction time from the last two records, using that A^{2p/(p+2)} is
/// asymptotically linear in t. Empty for traces with fewer than two records.
std::optional<double> extrapolate_extinction(const FlowTrace& trace, double p);

struct MonotoneCheck {
  double worst_min_speed_drop = 0.0;  // most negative relative increment (0 if none)
  double worst_ratio_drop = 0.0;
  long min_speed_step = -1;
  long ratio_step = -1;
  bool pass(double tolerance = 1e-9) const {
    return worst_min_speed_drop >= -tolerance && worst_ratio_drop >= -tolerance;
  }
};

/// Largest per-step decrease of min_speed and ratio, relative to max(1, |value|).
MonotoneCheck check_monotone(const FlowTrace& trace);

void write_trace_csv(std::ostream& os, const FlowTrace& trace);

}  // namespace centroflow
