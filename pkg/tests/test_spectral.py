"""Independent spectral probe tests: integrator accuracy and order, Hill
discriminant, band-edge location, and bound-state search."""

import numpy as np
import pytest

from darboux.chain import ChainSpec, ChainStage, build_single_defect, chain_potential
from darboux.elliptic import lame_system
from darboux.engine import SampledPotential, sample_lame_potential
from darboux.errors import AccuracyError, DomainError
from darboux.spectral import (
    SpectralReport,
    band_edges,
    bound_states,
    hill_discriminant,
    numerov_integrate,
)


@pytest.fixture(scope="module")
def lame_pot_05():
    sys = lame_system(0.5)
    T = sys.period
    pot = sample_lame_potential(sys, 0.0, T / 400, 401)
    return SampledPotential(0.0, T / 400, pot.values, period=T)


@pytest.fixture(scope="module")
def shifted_lame_05():
    """A purely displaced potential (one real-delta stage, epsilon=-0.3)."""
    sys = lame_system(0.5)
    T = sys.period
    spec = ChainSpec(
        sys=sys,
        stages=(ChainStage(epsilon=-0.3),),
        grid=(-10.0 * T, 20.0 * T / 6000, 6001),
    )
    return chain_potential(spec).final


# ---------------------------------------------------------------------------
# Integrator
# ---------------------------------------------------------------------------


def test_integrator_free_particle_sine():
    n = 2001
    h = np.pi / (n - 1)
    sol = numerov_integrate((np.zeros(n), h), 0.5)
    x = np.linspace(0.0, np.pi, n)
    assert float(np.max(np.abs(sol.values - np.sin(x)))) < 1e-9
    assert not sol.rescaled


def test_integrator_fourth_order():
    errs = []
    for n in (251, 501):
        h = np.pi / (n - 1)
        sol = numerov_integrate((np.zeros(n), h), 0.5)
        x = np.linspace(0.0, np.pi, n)
        errs.append(float(np.max(np.abs(sol.values - np.sin(x)))))
    order = np.log2(errs[0] / errs[1])
    assert abs(order - 4.0) < 0.3


def test_integrator_backward_direction():
    n = 801
    h = np.pi / (n - 1)
    sol = numerov_integrate((np.zeros(n), h), 0.5, direction="backward",
                            psi0=0.0, dpsi0=-1.0)
    x = np.linspace(0.0, np.pi, n)
    assert float(np.max(np.abs(sol.values - np.sin(np.pi - x)))) < 1e-9
    with pytest.raises(DomainError):
        numerov_integrate((np.zeros(n), h), 0.5, direction="up")


def test_integrator_rescales_deep_forbidden_region():
    n = 6001
    sol = numerov_integrate((np.zeros(n), 60.0 / (n - 1)), -50.0,
                            psi0=1.0, dpsi0=10.0)
    assert sol.rescaled
    assert float(np.max(sol.log_scale)) > 500.0
    assert np.all(np.isfinite(sol.psi))


# ---------------------------------------------------------------------------
# Hill discriminant
# ---------------------------------------------------------------------------


def test_free_discriminant_matches_closed_form():
    pot = SampledPotential(0.0, np.pi / 1024, np.zeros(1025), period=np.pi)
    for energy in (0.3, 0.7, 1.3, 2.6, 4.1):
        got = hill_discriminant(pot, energy)
        want = 2.0 * np.cos(np.pi * np.sqrt(2.0 * energy))
        assert abs(got - want) < 1e-8


def test_discriminant_band_gap_magnitudes(lame_pot_05):
    for energy in np.linspace(-0.24, -0.01, 20):
        assert abs(hill_discriminant(lame_pot_05, float(energy))) <= 2.0 + 1e-8
    assert abs(hill_discriminant(lame_pot_05, 0.12)) > 2.0


def test_discriminant_requires_period_metadata():
    pot = SampledPotential(0.0, 0.01, np.full(100, 0.7))
    with pytest.raises(DomainError):
        hill_discriminant(pot, 0.9)


def test_discriminant_rejects_incommensurate_grid():
    pot = SampledPotential(0.0, 0.03, np.full(200, 0.7), period=1.0)
    with pytest.raises(DomainError):
        hill_discriminant(pot, 0.9)


def test_discriminant_rejects_coarse_grid():
    pot = SampledPotential(0.0, 0.25, np.full(100, 0.7), period=1.0)
    with pytest.raises(DomainError):
        hill_discriminant(pot, 0.9)


def test_discriminant_accuracy_gate():
    """16 steps per period cannot support the convergence order at high
    energy; the probe must refuse rather than return garbage."""
    sys = lame_system(0.5)
    T = sys.period
    pot_c = sample_lame_potential(sys, 0.0, T / 16, 17)
    pot = SampledPotential(0.0, T / 16, pot_c.values, period=T)
    hill_discriminant(pot, 5.0)  # resolvable: no complaint
    with pytest.raises(AccuracyError):
        hill_discriminant(pot, 40.0)


# ---------------------------------------------------------------------------
# Band edges
# ---------------------------------------------------------------------------


def test_band_edges_lame(lame_pot_05):
    sys = lame_system(0.5)
    edges = band_edges(lame_pot_05, (-0.4, 0.4))
    assert len(edges) == 3
    want = ((sys.E0, "lower"), (sys.E1, "upper"), (sys.E1p, "lower"))
    for (got_e, got_k), (want_e, want_k) in zip(edges, want):
        assert abs(got_e - want_e) < 1e-4
        assert got_k == want_k


def test_band_edges_constant_potential():
    pot = SampledPotential(0.0, np.pi / 256, np.full(257, 0.7), period=np.pi)
    edges = band_edges(pot, (-0.3, 3.7))
    assert edges == [(pytest.approx(0.7, abs=1e-6), "lower")]


def test_band_edges_rejects_empty_range(lame_pot_05):
    with pytest.raises(DomainError):
        band_edges(lame_pot_05, (0.3, 0.2))


def test_band_edges_samples(lame_pot_05):
    edges, (energies, discs) = band_edges(
        lame_pot_05, (-0.3, 0.3), return_samples=True
    )
    assert energies.size >= 100
    assert energies.size == discs.size
    assert np.all(np.diff(energies) > 0)
    assert np.all(np.isfinite(discs))


# ---------------------------------------------------------------------------
# Bound states
# ---------------------------------------------------------------------------


def test_box_levels():
    n = 2001
    pot = SampledPotential(0.0, np.pi / (n - 1), np.zeros(n))
    found = bound_states(pot, (0.1, 5.0))
    want = [(0.5, 0), (2.0, 1), (4.5, 2)]
    assert len(found) == 3
    for (energy, nodes, residual), (want_e, want_n) in zip(found, want):
        assert abs(energy - want_e) / want_e < 1e-6
        assert nodes == want_n
        assert residual < 1e-8


def test_soliton_well_single_level():
    n = 3001
    x = np.linspace(-15.0, 15.0, n)
    v = -1.0 / np.cosh(x) ** 2 + 1.0 / 3.0
    pot = SampledPotential(-15.0, x[1] - x[0], v)
    found = bound_states(pot, (-0.4, -0.05))
    assert len(found) == 1
    energy, nodes, residual = found[0]
    assert abs(energy - (-1.0 / 6.0)) < 1e-6
    assert nodes == 0
    assert residual < 1e-8


def test_pure_displacement_has_no_gap_states(shifted_lame_05):
    """A displaced periodic potential keeps a purely continuous spectrum:
    the gap must stay empty."""
    assert shifted_lame_05.period is not None
    found = bound_states(shifted_lame_05, (0.01, 0.24))
    assert found == []


def test_defect_supports_gap_state():
    tp = build_single_defect(0.5, -0.35)
    found = bound_states(tp.final, (-0.45, -0.26))
    assert len(found) == 1
    energy, nodes, residual = found[0]
    assert abs(energy - (-0.35)) < 1e-3
    assert residual < 1e-8


def test_bound_states_rejects_window_touching_band(shifted_lame_05):
    with pytest.raises(DomainError):
        bound_states(shifted_lame_05, (-0.1, 0.24))


def test_bound_states_rejects_floquet_without_period():
    pot = SampledPotential(0.0, 0.01, np.zeros(1001))
    with pytest.raises(DomainError):
        bound_states(pot, (0.1, 5.0), bc="floquet")
    with pytest.raises(DomainError):
        bound_states(pot, (0.1, 5.0), bc="sideways")


# ---------------------------------------------------------------------------
# Report container
# ---------------------------------------------------------------------------


def test_report_validation_and_serialization():
    rep = SpectralReport(
        band_edges=((-0.25, "lower"), (0.0, "upper")),
        bound_states=((-0.35, 0, 1e-10),),
        discriminant_samples=((0.1, 2.5),),
    )
    d = rep.to_dict()
    assert d["band_edges"][0] == {"energy": -0.25, "kind": "lower"}
    assert d["bound_states"][0]["nodes"] == 0
    assert d["discriminant_samples"][0]["discriminant"] == 2.5
    with pytest.raises(DomainError):
        SpectralReport(band_edges=((0.0, "upper"), (-0.25, "lower")))
    with pytest.raises(DomainError):
        SpectralReport(band_edges=((0.0, "middle"),))
