"""Shared helpers for the test suite."""

import numpy as np
import pytest

from neckforge.profiles import WarpProfile


def gentle_random_warp(rng, length=1.0, max_modes=2):
    """Analytic warp with bounded fourth derivative.

    Returns (value_fn, d1_fn, d2_fn). Amplitudes and frequencies are kept
    small enough that an h = 1e-3 central-difference stencil resolves the
    metric to a few parts in 1e5, which is what the oracle comparisons need.
    """
    base = rng.uniform(0.4, 0.7)
    n_modes = int(rng.integers(1, max_modes + 1))
    amps = rng.uniform(0.01, 0.03, n_modes) * base
    freqs = rng.uniform(0.5, 1.25, n_modes) * 2.0 * np.pi / length
    phases = rng.uniform(0.0, 2.0 * np.pi, n_modes)

    def value(s):
        out = base * np.ones_like(np.asarray(s, dtype=float))
        for a, w, ph in zip(amps, freqs, phases):
            out = out + a * np.sin(w * np.asarray(s) + ph)
        return out

    def d1(s):
        out = np.zeros_like(np.asarray(s, dtype=float))
        for a, w, ph in zip(amps, freqs, phases):
            out = out + a * w * np.cos(w * np.asarray(s) + ph)
        return out

    def d2(s):
        out = np.zeros_like(np.asarray(s, dtype=float))
        for a, w, ph in zip(amps, freqs, phases):
            out = out - a * w * w * np.sin(w * np.asarray(s) + ph)
        return out

    return value, d1, d2


def gentle_random_profile(rng, fiber_dim, length=1.0, n_nodes=4096):
    """A WarpProfile sampled from gentle_random_warp on a dense grid."""
    value, _, _ = gentle_random_warp(rng, length=length)
    grid = np.linspace(0.0, length, n_nodes)
    return WarpProfile(grid=grid, values=value(grid), fiber_dim=fiber_dim)


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
