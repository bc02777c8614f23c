"""Shared fixtures and sampling helpers for the test suites."""

import numpy as np
import pytest

from darboux.elliptic import lame_system, lattice_distance

MODULI = (0.25, 0.5, 0.75)


@pytest.fixture(scope="session")
def systems():
    """The three benchmark moduli, built once."""
    return {m: lame_system(m) for m in MODULI}


@pytest.fixture(scope="session")
def sys05(systems):
    return systems[0.5]


def cell_points(inv, count, min_distance, seed=0):
    """Deterministic quasi-random points in the fundamental cell that keep
    ``min_distance`` away from every lattice point."""
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 200 * count:
            raise RuntimeError("point sampling failed to fill the quota")
        z = complex(
            rng.uniform(0.0, 2.0 * inv.omega),
            rng.uniform(0.0, 2.0 * inv.tau),
        )
        if lattice_distance(z, inv) > min_distance:
            out.append(z)
    return np.asarray(out)
