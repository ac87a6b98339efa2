"""Closed-form curvature formulas against hand-checkable constants."""

import numpy as np
import pytest

from neckforge.curvature import (
    round_closure_curvature,
    scalar_curvature_doubly_warped,
    scalar_curvature_warped,
)
from neckforge.errors import NonPositiveWarp


def test_round_three_sphere_is_six():
    s = np.linspace(0.2, np.pi - 0.2, 101)
    R = scalar_curvature_warped(np.sin(s), np.cos(s), -np.sin(s), fiber_dim=2)
    assert np.max(np.abs(R - 6.0)) < 1e-12


@pytest.mark.parametrize("fiber_dim", [1, 2, 3, 4, 5])
def test_round_sphere_every_dimension(fiber_dim):
    # sin warp over S^m closes S^{m+1}, scalar curvature m(m+1)
    s = np.linspace(0.3, np.pi - 0.3, 57)
    R = scalar_curvature_warped(np.sin(s), np.cos(s), -np.sin(s), fiber_dim)
    assert np.max(np.abs(R - fiber_dim * (fiber_dim + 1))) < 1e-11


def test_cylinder_over_half_radius_two_sphere():
    s = np.linspace(0.0, 3.0, 64)
    v = np.full_like(s, 0.5)
    R = scalar_curvature_warped(v, 0.0 * s, 0.0 * s, fiber_dim=2)
    assert np.max(np.abs(R - 8.0)) < 1e-13


def test_scaled_round_sphere():
    rho = 0.5
    s = np.linspace(0.2, np.pi * rho - 0.2, 77)
    v = rho * np.sin(s / rho)
    d1 = np.cos(s / rho)
    d2 = -np.sin(s / rho) / rho
    R = scalar_curvature_warped(v, d1, d2, fiber_dim=2)
    assert np.max(np.abs(R - 24.0)) < 1e-11


def test_clifford_slice_of_three_sphere():
    s = np.linspace(0.1, np.pi / 2 - 0.1, 93)
    R = scalar_curvature_doubly_warped(
        np.cos(s), -np.sin(s), -np.cos(s),
        np.sin(s), np.cos(s), -np.sin(s),
        dim_a=1, dim_b=1)
    assert np.max(np.abs(R - 6.0)) < 1e-12


def test_join_slice_of_five_sphere():
    # ds^2 + cos^2 g_{S^2} + sin^2 g_{S^2} is round S^5, scalar 20
    s = np.linspace(0.15, np.pi / 2 - 0.15, 61)
    R = scalar_curvature_doubly_warped(
        np.cos(s), -np.sin(s), -np.cos(s),
        np.sin(s), np.cos(s), -np.sin(s),
        dim_a=2, dim_b=2)
    assert np.max(np.abs(R - 20.0)) < 1e-11


def test_constant_product_recovers_fiber_curvature():
    beta = 0.37
    s = np.linspace(0.0, 1.0, 33)
    z = np.zeros_like(s)
    R = scalar_curvature_doubly_warped(
        np.ones_like(s), z, z,
        np.full_like(s, beta), z, z,
        dim_a=1, dim_b=2)
    assert np.max(np.abs(R - 2.0 / beta**2)) < 1e-11


def test_doubly_with_empty_first_factor_matches_singly(rng):
    s = np.linspace(0.0, 1.0, 40)
    v = 0.5 + 0.1 * np.sin(3 * s)
    d1 = 0.3 * np.cos(3 * s)
    d2 = -0.9 * np.sin(3 * s)
    junk = rng.normal(size=s.shape)
    single = scalar_curvature_warped(v, d1, d2, fiber_dim=3)
    double = scalar_curvature_doubly_warped(junk, junk, junk, v, d1, d2,
                                            dim_a=0, dim_b=3)
    assert np.array_equal(single, double)


def test_nonpositive_warp_rejected():
    s = np.linspace(0.0, 1.0, 16)
    v = np.sin(2.0 * np.pi * s)  # hits zero and goes negative
    with pytest.raises(NonPositiveWarp):
        scalar_curvature_warped(v, 0 * s, 0 * s, fiber_dim=2)
    with pytest.raises(NonPositiveWarp):
        scalar_curvature_doubly_warped(np.ones_like(s), 0 * s, 0 * s,
                                       v, 0 * s, 0 * s, dim_a=1, dim_b=2)


def test_round_closure_values():
    assert round_closure_curvature(2, 1.0) == pytest.approx(6.0, abs=1e-14)
    assert round_closure_curvature(2, 0.5) == pytest.approx(24.0, abs=1e-12)
    assert round_closure_curvature(3, 1.0) == pytest.approx(12.0, abs=1e-13)
    with pytest.raises(NonPositiveWarp):
        round_closure_curvature(2, 0.0)
