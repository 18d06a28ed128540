#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "centroflow/curve.hpp"

namespace centroflow {

/// Affine invariants of a convex curve.
struct AffineData {
  Field sigma;      // s r^{1/3}
  Field g_density;  // r^{2/3}; d(affine arc) = g dtheta
  Field mu;         // affine curvature, (1 - sigma_ss) / sigma
  double omega_p = 0.0;
  std::optional<double> omega_p_weighted;
};

/// Throws OutOfRange unless 1 < p < 2.
void require_flow_exponent(double p);

/// sigma, g, mu, Omega_p and (when `psi` is non-empty) Omega_p^Psi.
AffineData affine_data(const SupportField& s, double p, std::span<const double> psi = {});

/// Affine support function s r^{1/3}. Throws NotConvex.
Field affine_support(const SupportField& s);

/// Integral of s^{1-3q} r^{1-q} (times psi when given), q = p/(p+2).
double p_affine_length(const SupportField& s, double p, std::span<const double> psi = {});

/// Derivative with respect to affine arc length, order 1 or 2.
Field affine_derivative(std::span<const double> f, const SupportField& s, int order);

/// Affine curvature from the boundary parametrization:
/// [x'', x''']/D^{5/3} - (D^{-2/3})''/2 with D = [x', x''] = r^2.
/// Independent of the sigma identity used by affine_data.
Field affine_curvature_from_embedding(const SupportField& s);

struct LambdaCurve {
  std::vector<Point2> points;  // N + 1 points, the last at theta = 2 pi
  Field euclid_curvature;
  Field affine_curvature;
  double closure_defect = 0.0;
};

/// Lambda(theta) = (int_0^theta cos a / s^3, int_0^theta sin a / s^3).
LambdaCurve lambda_curve(const SupportField& s);

void write_lambda_csv(std::ostream& os, const LambdaCurve& curve);

struct CriticalPoints {
  bool degenerate = false;
  int count = 0;           // sign changes of f'
  int weighted_count = 0;  // tangential zeros counted twice
  std::vector<double> locations;
  std::vector<double> tangential;
};

/// Critical points of a field on [0, 2 pi) from sign changes of its spectral derivative.
CriticalPoints count_critical_points(std::span<const double> f);

}  // namespace centroflow
