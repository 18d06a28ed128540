#pragma once

#include <random>

#include "centroflow/curve.hpp"

namespace centroflow {

/// Support function of the ellipse x^2/a^2 + y^2/b^2 <= 1.
SupportField ellipse(double a, double b, int n_samples);

/// Random convex symmetric curve: a0 = 1, harmonics n <= max_harmonic that are
/// multiples of period_k, coefficients uniform in +-0.3/(4n^2-1), rejection
/// sampled until r > 0 on the grid.
FourierSpec random_convex_spec(std::mt19937_64& rng, int n_samples, int period_k = 1,
                               int max_harmonic = 6);

/// Entries uniform in [-2, 2] with |det| >= 1, rescaled (and a row flipped) to det 1.
LinearMap2 random_sl2(std::mt19937_64& rng);

/// s scaled so the enclosed area is pi.
SupportField normalized_area(const SupportField& s);

}  // namespace centroflow
