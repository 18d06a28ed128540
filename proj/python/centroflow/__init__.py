"""Centro-affine curve flow and planar Minkowski problem solver."""

from ._core import (
    ConfigError,
    Error,
    InvalidGrid,
    InvalidMap,
    NotACurve,
    NotConvex,
    OriginHit,
    OutOfRange,
    affine_data,
    apply_sl2,
    b_functional,
    count_critical_points,
    detect_periodicity,
    diagnose,
    ellipse,
    evolve,
    extinction_bound,
    forward,
    geometry,
    john_bounds,
    lambda_curve,
    selftest,
    solve,
    spectral_derivative,
    synthesize,
    winding_number,
)

__all__ = [name for name in dir() if not name.startswith("_")]
