"""Volume and diameter measurement against closed forms."""

import numpy as np
import pytest

from neckforge.errors import QuadratureNonConvergence
from neckforge.measure import (
    adaptive_panel_integral,
    diameter_bounds,
    profile_volume,
    total_volume,
)
from neckforge.profiles import DoublyWarpProfile, WarpProfile


def test_hemisphere_volume():
    grid = np.linspace(0.0, np.pi / 2, 4096)
    prof = WarpProfile(grid=grid, values=np.sin(grid), fiber_dim=2,
                       closed_start=True)
    assert profile_volume(prof) == pytest.approx(np.pi**2, rel=1e-9)


def test_full_three_sphere_volume():
    grid = np.linspace(0.0, np.pi, 4096)
    prof = WarpProfile(grid=grid, values=np.sin(grid), fiber_dim=2,
                       closed_start=True, closed_end=True)
    assert profile_volume(prof) == pytest.approx(2 * np.pi**2, rel=1e-9)


def test_cylinder_volume_exact():
    beta, L = 0.3, 5.0
    grid = np.linspace(0.0, L, 64)
    prof = WarpProfile(grid=grid, values=np.full(64, beta), fiber_dim=2)
    assert profile_volume(prof) == pytest.approx(4 * np.pi * beta**2 * L, rel=1e-13)


def test_product_body_volume():
    # S^1(2) x S^3(3) as a doubly warped profile: volume 4pi * 54 pi^2
    grid = np.linspace(0.0, 3 * np.pi, 8192)
    prof = DoublyWarpProfile(grid=grid, values_a=np.full(grid.size, 2.0),
                             values_b=3.0 * np.sin(grid / 3.0),
                             dim_a=1, dim_b=2, closed_start=1, closed_end=1)
    expected = (4 * np.pi) * (2 * np.pi**2 * 27)
    assert profile_volume(prof) == pytest.approx(expected, rel=1e-9)


def test_total_volume_adds():
    grid = np.linspace(0.0, 1.0, 32)
    prof = WarpProfile(grid=grid, values=np.full(32, 0.5), fiber_dim=2)
    assert total_volume([prof, prof]) == pytest.approx(2 * profile_volume(prof),
                                                       rel=1e-14)


def test_diameter_bounds_cylinder():
    beta, L = 0.3, 5.0
    grid = np.linspace(0.0, L, 64)
    prof = WarpProfile(grid=grid, values=np.full(64, beta), fiber_dim=2)
    lo, hi = diameter_bounds([prof])
    assert lo == pytest.approx(L, abs=1e-12)
    assert hi == pytest.approx(L + np.pi * beta, abs=1e-12)


def test_diameter_bounds_chain_and_product_fiber():
    grid = np.linspace(0.0, 2.0, 64)
    single = WarpProfile(grid=grid, values=np.full(64, 0.5), fiber_dim=2)
    double = DoublyWarpProfile(grid=grid, values_a=np.full(64, 0.3),
                               values_b=np.full(64, 0.4), dim_a=1, dim_b=2)
    lo, hi = diameter_bounds([single, double])
    assert lo == pytest.approx(4.0, abs=1e-12)
    assert hi == pytest.approx(4.0 + np.pi * 0.5, abs=1e-12)


def test_adaptive_integral_smooth():
    val = adaptive_panel_integral(np.exp, np.linspace(0.0, 1.0, 5))
    assert val == pytest.approx(np.e - 1.0, rel=1e-13)


def test_adaptive_integral_nonconvergence():
    wild = lambda x: np.sin(1.0 / (x + 1e-7))
    with pytest.raises(QuadratureNonConvergence):
        adaptive_panel_integral(wild, [0.0, 1.0], rel_tol=1e-12, max_depth=6)
