#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "centroflow/affine.hpp"
#include "centroflow/curve.hpp"

namespace centroflow {

/// Midpoint nodes on (0, pi) for the B integral.
constexpr int kDefaultBQuadrature = 2048;
constexpr int kDefaultWindingSamples = 1024;

struct NecessaryCondition {
  CriticalPoints critical;
  bool pass = false;  // count >= 8, or a constant field
};

NecessaryCondition necessary_condition(std::span<const double> phi);

/// int_0^pi (Phi^3)' alpha / u^2 for alpha = 1, cos 2x, sin 2x (Phi in the sigma convention).
std::array<double, 3> kazdan_warner(std::span<const double> phi, const SupportField& u);

/// B(x, f) = int_0^pi (f(x+t) - f(x) - f'(x) sin(2t)/2) / sin^2 t dt, integrand
/// evaluated from the trigonometric interpolant of f. Acts on the field it is given.
double b_functional(std::span<const double> f, double x, int quadrature = kDefaultBQuadrature);

/// B at the grid angles in [0, pi) (N/2 values), via the per-harmonic multipliers
/// of the same midpoint rule.
Field b_field(std::span<const double> f, int quadrature = kDefaultBQuadrature);

/// Quadrature value of B on e^{imt}, i.e. int_0^pi (cos mt - 1) / sin^2 t dt for even m.
double b_multiplier(int m, int quadrature = kDefaultBQuadrature);

/// Winding number of x -> (-B(x), f'(x)) over [0, pi), counterclockwise positive.
/// Throws OriginHit when the curve passes within 1e-9 max|f| of the origin.
int winding_number(std::span<const double> f, int samples = kDefaultWindingSamples,
                   int quadrature = kDefaultBQuadrature);

struct ObstructionReport {
  CriticalPoints critical;
  std::optional<std::array<double, 3>> kw;
  Field b_values;                 // B(., Phi^3) on [0, pi)
  std::vector<double> b_at_critical;
  double b_min_at_critical = 0.0;  // min |B| over critical points
  bool b_nondegenerate = false;
  std::optional<int> winding;     // empty when the map hits the origin
  bool necessary_condition_pass = false;
  bool theorem_b_applicable = false;
};

/// Full diagnosis of Phi; B and the winding number use Phi^3. `u` is a
/// candidate solution for the Kazdan-Warner integrals.
ObstructionReport diagnose(std::span<const double> phi, const SupportField* u = nullptr);

}  // namespace centroflow
