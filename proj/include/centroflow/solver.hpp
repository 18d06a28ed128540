#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "centroflow/curve.hpp"
#include "centroflow/flow.hpp"

namespace centroflow {

/// A target Phi for s (s'' + s)^{1/3} = Phi and the flow weight derived from it.
struct TargetData {
  Field phi;
  int k = 1;   // detected periodicity (kUnboundedPeriodicity for constants)
  Field psi;   // Phi^{3p/(p+2)}
  double p = 1.5;
};

/// Validates Phi (positive, origin-symmetric, N % 4 == 0) and p.
TargetData make_target(Field phi, double p);

/// Phi = s r^{1/3}; s solves the problem for this Phi by construction.
Field forward(const SupportField& s);

struct Calibration {
  double lambda_star = 1.0;
  double residual_sup = 0.0;
};

/// log lambda* = (3/4) mean(log Phi - log sigma); residual = sup |lambda*^{4/3} sigma - Phi|.
Calibration calibrate_scale(std::span<const double> sigma, std::span<const double> phi);

enum class SolveStatus { Converged, ApproximatingFamily, Halted };

const char* to_string(SolveStatus status);

struct Snapshot {
  long step = 0;
  double t = 0.0;
  double tau = 0.0;
  double residual_sup = 0.0;
  double residual_osc = 0.0;
  double aspect = 0.0;
  SupportField s;  // calibrated
};

struct SolveReport {
  SolveStatus status = SolveStatus::Halted;
  SupportField best_s;
  double residual_sup = 0.0;
  double residual_osc = 0.0;
  double lambda_star = 1.0;
  int k = 1;
  double p = 1.5;
  long n_steps = 0;
  double final_aspect = 1.0;
  std::string detail;
  FlowTrace trace;
  std::vector<Snapshot> snapshots;
};

/// Flow settings used by solve() unless overridden: normalized RKC at N = 256.
FlowConfig default_solve_config();

/// Initial curve 1 + eps cos(2 k theta) for k >= 2, else the unit circle.
SupportField seed_curve(int k, int n_samples);

/// Runs the normalized flow with Psi = Phi^{3p/(p+2)}. cfg.p, cfg.psi and
/// cfg.normalize are taken from the target / forced on.
SolveReport solve(const TargetData& target, FlowConfig cfg);

struct SL2Orbit {
  LinearMap2 transform;
  SupportField s;  // apply_sl2(s, T)
  Field phi;       // Phi at the corresponding normals, Phi(T^t z / |T^t z|)
};

SL2Orbit sl2_solution_orbit(const SupportField& s, const LinearMap2& t);

/// Target Phi transported to T(K)'s normals.
Field transform_target(std::span<const double> phi, const LinearMap2& t);

}  // namespace centroflow
