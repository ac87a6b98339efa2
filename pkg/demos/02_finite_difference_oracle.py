"""
Independent finite-difference curvature oracle
==============================================

Every closed-form curvature value in this library can be cross-checked
against a slow but completely independent route: write the metric in an
explicit coordinate chart, difference it twice to get the Riemann
tensor, and trace.  This script runs that oracle against the closed
form on a hand-written warp profile and on a stereographic sphere
chart.
"""

import numpy as np

from neckforge.curvature import scalar_curvature_warped
from neckforge.oracle import (
    finite_difference_scalar,
    stereographic_sphere_chart,
    warped_profile_chart,
)

# a smooth warp profile with analytic derivatives, kept well away from
# zeros so the chart is regular
def value(s: float) -> float:
    return 0.9 + 0.12 * np.sin(2.0 * s) + 0.05 * np.cos(3.0 * s)

def d1(s: float) -> float:
    return 0.24 * np.cos(2.0 * s) - 0.15 * np.sin(3.0 * s)

def d2(s: float) -> float:
    return -0.48 * np.sin(2.0 * s) - 0.45 * np.cos(3.0 * s)

fiber_dim = 3
chart = warped_profile_chart(value, fiber_dim, 0.0, 1.0)

print("warp profile, closed form vs finite differences")
rng = np.random.default_rng(7)
worst = 0.0
for _ in range(5):
    s0 = float(rng.uniform(0.35, 0.65))
    point = np.concatenate([[s0], rng.uniform(-0.2, 0.2, fiber_dim)])
    closed = float(scalar_curvature_warped(value(s0), d1(s0), d2(s0),
                                           fiber_dim))
    fd = finite_difference_scalar(chart, point, step=1e-3)
    rel = abs(fd - closed) / abs(closed)
    worst = max(worst, rel)
    print(f"  s = {s0:.3f}:  closed = {closed:+10.5f},"
          f"  fd = {fd:+10.5f},  rel err = {rel:.2e}")
print(f"  worst relative error = {worst:.2e}")

# the unit 3-sphere in a stereographic chart has scalar curvature 6
print()
print("stereographic chart of the unit 3-sphere")
sphere = stereographic_sphere_chart(3, 1.0)
for point in ([0.0, 0.0, 0.0], [0.3, -0.2, 0.1], [0.5, 0.4, -0.3]):
    fd = finite_difference_scalar(sphere, np.array(point), step=1e-3)
    print(f"  at {point}:  fd = {fd:.6f}  (exact 6)")
