"""Finite-difference scalar curvature oracle.

An independent route to scalar curvature that shares no algebra with the
closed forms in curvature.py: sample the metric matrix of a coordinate
chart on a central-difference stencil, assemble Christoffel symbols, their
derivatives and the Ricci contraction, and trace. Cost per point is
1 + 2 d^2 metric evaluations in dimension d.

Used by the test suite to certify the warped-product formulas, and offered
as a library primitive for spot checks on any chart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BoundaryProximity, ParameterOutOfRange, SingularMetric

__all__ = [
    "CoordinateChartMetric",
    "finite_difference_scalar",
    "flat_chart",
    "stereographic_sphere_chart",
    "warped_profile_chart",
    "doubly_warped_profile_chart",
]


@dataclass(frozen=True)
class CoordinateChartMetric:
    """A metric given as a callable x -> symmetric (dim, dim) matrix on a box.

    domain_box rows are (lo, hi) per coordinate; the finite-difference
    stencil must fit inside with a safety margin.
    """

    dim: int
    metric: Callable[[np.ndarray], np.ndarray]
    domain_box: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        box = np.asarray(self.domain_box, dtype=float)
        if box.shape != (self.dim, 2) or np.any(box[:, 1] <= box[:, 0]):
            raise ParameterOutOfRange("domain_box must be (dim, 2) with lo < hi")
        object.__setattr__(self, "domain_box", box)


def _metric_at(chart: CoordinateChartMetric, x: np.ndarray) -> np.ndarray:
    g = np.asarray(chart.metric(x), dtype=float)
    if g.shape != (chart.dim, chart.dim):
        raise ParameterOutOfRange(
            f"metric callable returned shape {g.shape}, wanted {(chart.dim,) * 2}")
    return 0.5 * (g + g.T)


def finite_difference_scalar(chart: CoordinateChartMetric, point,
                             step: float = 1e-3) -> float:
    """Scalar curvature at a point from central differences of the metric.

    Raises BoundaryProximity if the stencil (reach `step`, kept with a
    2*step margin) does not fit in the chart's domain box, and
    SingularMetric if the metric at the point is not positive definite.
    """
    x = np.asarray(point, dtype=float)
    d = chart.dim
    h = float(step)
    if x.shape != (d,):
        raise ParameterOutOfRange(f"point must have shape ({d},)")
    if not h > 0.0:
        raise ParameterOutOfRange("step must be positive")
    box = chart.domain_box
    if np.any(x - 2 * h < box[:, 0]) or np.any(x + 2 * h > box[:, 1]):
        raise BoundaryProximity(
            "stencil would leave the chart domain; move the point or shrink step")

    g0 = _metric_at(chart, x)
    try:
        np.linalg.cholesky(g0)
    except np.linalg.LinAlgError:
        raise SingularMetric(f"metric is not positive definite at {x}") from None

    eye = np.eye(d)
    gp = np.empty((d, d, d))
    gm = np.empty((d, d, d))
    for k in range(d):
        gp[k] = _metric_at(chart, x + h * eye[k])
        gm[k] = _metric_at(chart, x - h * eye[k])

    dg = (gp - gm) / (2.0 * h)

    ddg = np.empty((d, d, d, d))
    for k in range(d):
        ddg[k, k] = (gp[k] - 2.0 * g0 + gm[k]) / (h * h)
        for l in range(k + 1, d):
            gpp = _metric_at(chart, x + h * eye[k] + h * eye[l])
            gpm = _metric_at(chart, x + h * eye[k] - h * eye[l])
            gmp = _metric_at(chart, x - h * eye[k] + h * eye[l])
            gmm = _metric_at(chart, x - h * eye[k] - h * eye[l])
            ddg[k, l] = (gpp - gpm - gmp + gmm) / (4.0 * h * h)
            ddg[l, k] = ddg[k, l]

    ginv = np.linalg.inv(g0)

    # Christoffel symbols of the first kind: gamma1[c, a, b] = [ab, c]
    gamma1 = 0.5 * (np.einsum('abc->cab', dg) + np.einsum('bac->cab', dg) - dg)

    gamma2 = np.einsum('lc,cab->lab', ginv, gamma1)

    # dgamma1[k, c, a, b] = partial_k [ab, c]
    dgamma1 = 0.5 * (np.einsum('kabc->kcab', ddg) + np.einsum('kbac->kcab', ddg)
                     - ddg)

    dginv = np.einsum('la,kab,bm->klm', -ginv, dg, ginv)
    dgamma2 = (np.einsum('klc,cab->klab', dginv, gamma1)
               + np.einsum('lc,kcab->klab', ginv, dgamma1))

    term1 = np.einsum('kkab->ab', dgamma2)
    term2 = np.einsum('akkb->ab', dgamma2)
    term3 = np.einsum('kkc,cab->ab', gamma2, gamma2)
    term4 = np.einsum('kac,ckb->ab', gamma2, gamma2)
    ricci = term1 - term2 + term3 - term4

    return float(np.einsum('ab,ab->', ginv, ricci))


# -- chart builders -----------------------------------------------------------


def flat_chart(dim: int, extent: float = 1.0) -> CoordinateChartMetric:
    """Euclidean space; scalar curvature 0."""
    box = np.tile([-extent, extent], (dim, 1))
    return CoordinateChartMetric(dim=dim, metric=lambda x: np.eye(dim),
                                 domain_box=box, label=f"flat R^{dim}")


def _stereo_factor(y: np.ndarray, radius: float) -> float:
    r2 = float(np.dot(y, y))
    return 4.0 * radius**4 / (radius**2 + r2) ** 2


def stereographic_sphere_chart(dim: int, radius: float = 1.0,
                               extent: float = 0.8) -> CoordinateChartMetric:
    """Round S^dim(radius) in stereographic coordinates.

    g_ij = 4 radius^4 / (radius^2 + |x|^2)^2 delta_ij, scalar curvature
    dim (dim - 1) / radius^2 everywhere.
    """
    if not radius > 0.0:
        raise ParameterOutOfRange("radius must be positive")

    def metric(x: np.ndarray) -> np.ndarray:
        return _stereo_factor(x, radius) * np.eye(dim)

    box = np.tile([-extent * radius, extent * radius], (dim, 1))
    return CoordinateChartMetric(dim=dim, metric=metric, domain_box=box,
                                 label=f"S^{dim}({radius}) stereographic")


def warped_profile_chart(value_fn: Callable[[float], float], fiber_dim: int,
                         s_lo: float, s_hi: float,
                         fiber_extent: float = 0.8) -> CoordinateChartMetric:
    """Chart for ds^2 + v(s)^2 g_{S^m} with the sphere in stereographic form.

    Coordinates (s, y_1 .. y_m). Any callable works: a profile's .value,
    an analytic function, a perturbed variant for negative tests.
    """
    m = int(fiber_dim)
    dim = 1 + m

    def metric(x: np.ndarray) -> np.ndarray:
        v = float(value_fn(x[0]))
        g = np.eye(dim)
        g[1:, 1:] = v * v * _stereo_factor(x[1:], 1.0) * np.eye(m)
        return g

    box = np.vstack([[s_lo, s_hi], np.tile([-fiber_extent, fiber_extent], (m, 1))])
    return CoordinateChartMetric(dim=dim, metric=metric, domain_box=box,
                                 label="warped product chart")


def doubly_warped_profile_chart(value_a_fn: Callable[[float], float],
                                value_b_fn: Callable[[float], float],
                                dim_a: int, dim_b: int,
                                s_lo: float, s_hi: float,
                                fiber_extent: float = 0.8) -> CoordinateChartMetric:
    """Chart for ds^2 + va^2 g_{S^p} + vb^2 g_{S^f}, both spheres stereographic."""
    p, f = int(dim_a), int(dim_b)
    dim = 1 + p + f

    def metric(x: np.ndarray) -> np.ndarray:
        va = float(value_a_fn(x[0]))
        vb = float(value_b_fn(x[0]))
        g = np.eye(dim)
        g[1:1 + p, 1:1 + p] = va * va * _stereo_factor(x[1:1 + p], 1.0) * np.eye(p)
        g[1 + p:, 1 + p:] = vb * vb * _stereo_factor(x[1 + p:], 1.0) * np.eye(f)
        return g

    box = np.vstack([[s_lo, s_hi],
                     np.tile([-fiber_extent, fiber_extent], (p + f, 1))])
    return CoordinateChartMetric(dim=dim, metric=metric, domain_box=box,
                                 label="doubly warped product chart")
