"""Closed-form scalar curvature of warped product metrics.

Metrics handled here have the shape

    ds^2 + v(s)^2 g_round

over an interval, with g_round the unit round metric on a sphere of
dimension `fiber_dim` (singly warped), or

    ds^2 + va(s)^2 g_a + vb(s)^2 g_b

with two round factors (doubly warped). All functions are vectorized over
the sample axis and operate on precomputed value/derivative arrays so the
same algebra serves splines, analytic test functions, and design formulas.
"""

from __future__ import annotations

import numpy as np

from .errors import NonPositiveWarp

__all__ = [
    "scalar_curvature_warped",
    "scalar_curvature_doubly_warped",
    "round_closure_curvature",
]


def _check_positive(v: np.ndarray, name: str) -> None:
    if np.any(v <= 0.0):
        bad = float(np.min(v))
        raise NonPositiveWarp(f"{name} must be positive at curvature samples, min={bad}")


def scalar_curvature_warped(value, d1, d2, fiber_dim: int):
    """Scalar curvature of ds^2 + v^2 g_{S^m}, m = fiber_dim.

    R = m(m-1) (1 - v'^2) / v^2 - 2 m v'' / v

    Calibration values: v = sin, m = 2 gives 6 (unit round 3-sphere);
    v = 1/2 constant, m = 2 gives 8 (cylinder over S^2(1/2)).
    """
    v = np.asarray(value, dtype=float)
    dv = np.asarray(d1, dtype=float)
    ddv = np.asarray(d2, dtype=float)
    _check_positive(v, "warp")
    m = int(fiber_dim)
    return m * (m - 1) * (1.0 - dv * dv) / (v * v) - 2.0 * m * ddv / v


def scalar_curvature_doubly_warped(value_a, d1_a, d2_a, value_b, d1_b, d2_b,
                                   dim_a: int, dim_b: int):
    """Scalar curvature of ds^2 + va^2 g_{S^p} + vb^2 g_{S^f}.

    With p = dim_a and f = dim_b:

    R = p(p-1)(1 - va'^2)/va^2 - 2p va''/va
      + f(f-1)(1 - vb'^2)/vb^2 - 2f vb''/vb
      - 2 p f va' vb' / (va vb)

    dim_a = 0 reduces to the singly warped formula in vb. Calibration:
    va = cos, vb = sin, p = f = 1 gives 6 (round 3-sphere sliced over the
    Clifford torus); va = 1, vb = beta constants, p = 1, f = 2 gives
    2 / beta^2.
    """
    va = np.asarray(value_a, dtype=float)
    da = np.asarray(d1_a, dtype=float)
    dda = np.asarray(d2_a, dtype=float)
    vb = np.asarray(value_b, dtype=float)
    db = np.asarray(d1_b, dtype=float)
    ddb = np.asarray(d2_b, dtype=float)
    p = int(dim_a)
    f = int(dim_b)
    _check_positive(vb, "second warp")
    out = f * (f - 1) * (1.0 - db * db) / (vb * vb) - 2.0 * f * ddb / vb
    if p > 0:
        _check_positive(va, "first warp")
        out = out + p * (p - 1) * (1.0 - da * da) / (va * va) - 2.0 * p * dda / va
        out = out - 2.0 * p * f * da * db / (va * vb)
    return out


def round_closure_curvature(fiber_dim: int, radius: float) -> float:
    """Scalar curvature where a warp closes an exactly round pole.

    A factor v(s) = radius * sin(s / radius) with fiber dimension m closes
    smoothly and contributes m(m+1)/radius^2 to the scalar curvature at the
    pole (the value of the full round sphere S^{m+1}(radius)).
    """
    m = int(fiber_dim)
    if radius <= 0.0:
        raise NonPositiveWarp("round closure needs a positive radius")
    return m * (m + 1) / (radius * radius)
