"""Acceptance suite: every top-level numerical claim of the library, one
test per criterion, each printing a single pass/fail summary line.

These tests intentionally re-derive their expectations inline (closed
forms, independent formulas, negative controls) rather than importing
values computed by the code under test.
"""

import time

import numpy as np
import pytest

from conftest import MODULI, cell_points
from darboux.chain import (
    ChainSpec,
    ChainStage,
    backlund_step,
    build_double_gap_defect,
    build_single_defect,
    chain_potential,
)
from darboux.elliptic import (
    addition_residual,
    invariants_from_modulus,
    jacobi_sn,
    lame_potential,
    lame_system,
    lattice_distance,
    weierstrass_ode_residual,
    wp,
)
from darboux.engine import (
    SampledPotential,
    displacement_from_energy,
    displacement_residual,
    displacement_residual_for,
    general_riccati_solution,
    make_general_superpotential,
    make_zeta_superpotential,
    movable_singularities,
    riccati_residual,
    sample_lame_potential,
)
from darboux.errors import DegeneratePairError
from darboux.spectral import band_edges, bound_states, hill_discriminant


def _report(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} [{name}] {detail}"
    print(line, flush=True)
    assert ok, line


# ---------------------------------------------------------------------------


def test_c01_kernel_satisfies_defining_ode():
    """Squared-derivative identity of the kernel at 200 random points per
    modulus, residual < 1e-9, all three moduli checked within 1 second."""
    t0 = time.perf_counter()
    worst = 0.0
    for m in MODULI:
        inv = invariants_from_modulus(m)
        z = cell_points(inv, 200, 0.2, seed=int(m * 100))
        worst = max(worst, float(np.max(weierstrass_ode_residual(z, inv))))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 1.0
    _report(
        "defining-ode",
        ok,
        f"worst={worst:.3e} tol=1e-09 elapsed={elapsed:.2f}s limit=1s",
    )


def test_c02_periodic_potential_identity():
    """The shifted-argument kernel evaluation equals the bounded real form
    of the potential on [-3w, 3w] at 2001 points, residual < 1e-9."""
    worst = 0.0
    for m in MODULI:
        sys = lame_system(m)
        inv = sys.inv
        x = np.linspace(-3.0 * inv.omega, 3.0 * inv.omega, 2001)
        v_kernel = wp(x + 1j * inv.tau, inv)
        v_bounded = m * jacobi_sn(x, m) ** 2 - (m + 1.0) / 3.0
        worst = max(
            worst,
            float(np.max(np.abs(np.real(v_kernel) - v_bounded))),
            float(np.max(np.abs(np.imag(v_kernel)))),
        )
    ok = worst < 1e-9
    _report("potential-identity", ok, f"worst={worst:.3e} tol=1e-09")


def test_c03_addition_laws():
    """Both two-point addition identities at 100 admissible random pairs
    per branch per modulus, residual < 1e-8."""
    worst = 0.0
    rng = np.random.default_rng(42)
    for m in MODULI:
        inv = invariants_from_modulus(m)
        hi = min(inv.omega, 3.0) - 0.15
        for branch in ("S", "R"):
            done = 0
            while done < 100:
                u, v = rng.uniform(0.15, hi, size=2)
                if branch == "S" and lattice_distance(u + v, inv) < 0.05:
                    continue
                try:
                    r = addition_residual(u, v, inv, branch=branch)
                except DegeneratePairError:
                    continue
                worst = max(worst, float(r))
                done += 1
    ok = worst < 1e-8
    _report("addition-laws", ok, f"worst={worst:.3e} tol=1e-08")


def test_c04_displacement_criterion():
    """The displacement combination of the potential is flat (spread <
    1e-8) with the recovered constant matching -kernel(delta)/2 to 1e-8,
    for 8 displacements per modulus; a quadratic-well negative control
    must show spread > 0.1."""
    worst_spread = 0.0
    worst_eps = 0.0
    for m in MODULI:
        sys = lame_system(m)
        for j in range(1, 9):
            delta = 2.0 * sys.inv.omega * j / 9.0
            spread, eps = displacement_residual(sys, delta)
            target = -0.5 * float(np.real(wp(np.array([delta + 0j]), sys.inv)[0]))
            worst_spread = max(worst_spread, float(spread))
            worst_eps = max(worst_eps, abs(float(eps) - target))
    x = np.linspace(-3.0, 3.0, 481)
    control, _ = displacement_residual_for(
        lambda t: 0.5 * t * t, lambda t: t, 0.7, x
    )
    ok = worst_spread < 1e-8 and worst_eps < 1e-8 and control > 0.1
    _report(
        "displacement-criterion",
        ok,
        f"spread={worst_spread:.3e} eps_err={worst_eps:.3e} tol=1e-08 "
        f"control={control:.3f} (must exceed 0.1)",
    )


def test_c05_displacement_property():
    """max |V(x+delta) - V(x) - alpha'(x)| < 1e-8 for generic
    displacements, for the half-period (where the constant equals
    (m-2)/6), and for the solitonic limit with delta in {0.5, 1, 2, 5}."""
    worst = 0.0
    worst_e0 = 0.0
    for m in MODULI:
        sys = lame_system(m)
        x = np.linspace(-1.5 * sys.period, 1.5 * sys.period, 801)
        deltas = [2.0 * sys.inv.omega * j / 9.0 for j in range(1, 9)]
        deltas.append(sys.inv.omega)
        for delta in deltas:
            alpha = make_zeta_superpotential(sys, delta)
            gap = lame_potential(x + delta, sys) - lame_potential(x, sys)
            worst = max(worst, float(np.max(np.abs(gap - alpha.alpha_prime(x)))))
        alpha_half = make_zeta_superpotential(sys, sys.inv.omega)
        worst_e0 = max(worst_e0, abs(alpha_half.epsilon - (m - 2.0) / 6.0))
    sys1 = lame_system(1.0)
    x1 = np.linspace(-8.0, 8.0, 801)
    for delta in (0.5, 1.0, 2.0, 5.0):
        alpha = make_zeta_superpotential(sys1, delta)
        gap = lame_potential(x1 + delta, sys1) - lame_potential(x1, sys1)
        worst = max(worst, float(np.max(np.abs(gap - alpha.alpha_prime(x1)))))
    ok = worst < 1e-8 and worst_e0 < 1e-10
    _report(
        "displacement-property",
        ok,
        f"worst={worst:.3e} tol=1e-08 half-period-energy-err={worst_e0:.2e}",
    )


def test_c06_general_riccati_solutions():
    """The one-parameter solution family satisfies the first equation of
    the pair to < 1e-7 away from its movable singularities, for mixing
    values {0, +-0.5, 2, 1e6}; the zero-mixing member reproduces the
    closed form to 1e-12."""
    sys = lame_system(0.5)
    delta = 0.7
    eps = float(np.real(-0.5 * wp(np.array([delta + 0j]), sys.inv)[0]))
    x = np.linspace(-3.0 * sys.inv.omega, 3.0 * sys.inv.omega, 2001)
    keep_base = (lattice_distance(x, sys.inv) > 0.1) & (
        lattice_distance(x + delta, sys.inv) > 0.1
    )
    worst = 0.0
    for gamma in (0.5, -0.5, 2.0, 1e6):
        keep = keep_base.copy()
        for s in movable_singularities(sys, delta, gamma, float(x[0]), float(x[-1])):
            keep &= np.abs(x - s) > 0.05
        xs = x[keep]
        alpha = make_general_superpotential(sys, delta, gamma)
        worst = max(
            worst,
            float(
                riccati_residual(
                    alpha.alpha(xs),
                    alpha.alpha_prime(xs),
                    lame_potential(xs, sys),
                    eps,
                    "forward",
                )
            ),
        )
    zeta_form = make_zeta_superpotential(sys, delta)
    xs = x[keep_base]
    zero_gap = float(
        np.max(np.abs(general_riccati_solution(xs, delta, 0.0, sys) - zeta_form.alpha(xs)))
    )
    ok = worst < 1e-7 and zero_gap < 1e-12
    _report(
        "general-riccati",
        ok,
        f"worst={worst:.3e} tol=1e-07 zero-mixing-gap={zero_gap:.3e} tol=1e-12",
    )


def test_c07_finite_difference_chain():
    """The algebraically stepped second-stage solution satisfies the
    first-stage partner equation to < 1e-6, and the two-stage result is
    independent of stage order to < 1e-8."""
    sys = lame_system(0.5)
    eps1, eps2 = -0.35, -0.45
    sp1 = make_zeta_superpotential(sys, displacement_from_energy(sys, eps1))
    sp2 = make_zeta_superpotential(sys, displacement_from_energy(sys, eps2))
    x = np.linspace(-2.5, 2.5, 1001)
    stepped = backlund_step(sp1.alpha(x), sp2.alpha(x), eps1, eps2, x=x)
    h = 1e-5
    d_stepped = (
        backlund_step(sp1.alpha(x + h), sp2.alpha(x + h), eps1, eps2)
        - backlund_step(sp1.alpha(x - h), sp2.alpha(x - h), eps1, eps2)
    ) / (2.0 * h)
    partner = lame_potential(x, sys) + sp1.alpha_prime(x)
    step_res = float(riccati_residual(stepped, d_stepped, partner, eps2, "forward"))

    grid = (-1.5 * sys.period, 3.0 * sys.period / 720, 721)
    fwd = chain_potential(
        ChainSpec(sys=sys, stages=(ChainStage(epsilon=eps1), ChainStage(epsilon=eps2)), grid=grid)
    )
    rev = chain_potential(
        ChainSpec(sys=sys, stages=(ChainStage(epsilon=eps2), ChainStage(epsilon=eps1)), grid=grid)
    )
    swap = float(np.max(np.abs(fwd.final.values - rev.final.values)))
    ok = step_res < 1e-6 and swap < 1e-8
    _report(
        "step-chain",
        ok,
        f"partner-residual={step_res:.3e} tol=1e-06 order-swap={swap:.3e} tol=1e-08",
    )


def test_c08_band_edges_all_moduli():
    """The spectral probe locates the three closed-form band edges
    (m-2)/6, (1-2m)/6, (m+1)/6 to 1e-4 for each modulus, within 30
    seconds per modulus at 4000 steps per period."""
    worst = 0.0
    slowest = 0.0
    for m in MODULI:
        sys = lame_system(m)
        T = sys.period
        pot_raw = sample_lame_potential(sys, 0.0, T / 4000, 4001)
        pot = SampledPotential(0.0, T / 4000, pot_raw.values, period=T)
        want = sorted(((m - 2.0) / 6.0, (1.0 - 2.0 * m) / 6.0, (m + 1.0) / 6.0))
        t0 = time.perf_counter()
        edges = band_edges(pot, (want[0] - 0.1, want[2] + 0.1))
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        assert len(edges) == 3, f"m={m}: found {len(edges)} edges, wanted 3"
        for (got, _kind), target in zip(edges, want):
            worst = max(worst, abs(got - target))
    ok = worst < 1e-4 and slowest < 30.0
    _report(
        "band-edges",
        ok,
        f"worst={worst:.3e} tol=1e-04 slowest={slowest:.1f}s limit=30s",
    )


def test_c09_single_defect_level():
    """The below-spectrum defect construction carries exactly one bound
    state, at the requested energy to 1e-3, on a nonsingular potential."""
    eps = -0.35
    tp = build_single_defect(0.5, eps)
    finite = bool(np.all(np.isfinite(tp.final.values)))
    states = bound_states(tp.final, (eps - 0.15, -0.25 - 1e-3))
    n_found = len(states)
    err = abs(states[0][0] - eps) if n_found == 1 else float("inf")
    ok = finite and n_found == 1 and err <= 1e-3 and not tp.singularities
    _report(
        "single-defect",
        ok,
        f"states={n_found} (want 1) energy-err={err:.2e} tol=1e-03 "
        f"finite={finite} singularities={list(tp.singularities)}",
    )


def test_c10_double_gap_defect_levels():
    """The two-stage gap construction carries exactly two bound states in
    the forbidden band, each at its requested energy to 1e-3, with no
    spurious levels anywhere in the gap window."""
    e1, e2 = 0.08, 0.17
    tp = build_double_gap_defect(0.5, e1, e2)
    finite = bool(np.all(np.isfinite(tp.final.values)))
    states = bound_states(tp.final, (0.005, 0.245))
    n_found = len(states)
    errs = (
        [abs(s[0] - w) for s, w in zip(states, (e1, e2))]
        if n_found == 2
        else [float("inf")]
    )
    ok = finite and n_found == 2 and max(errs) <= 1e-3
    _report(
        "double-gap-defect",
        ok,
        f"states={n_found} (want 2) energy-errs={['%.2e' % e for e in errs]} tol=1e-03",
    )


def test_c11_probe_closed_form_controls():
    """Independent probe sanity: hard-wall levels n^2 pi^2 / (2 L^2) to
    1e-6 relative, and the flat-potential discriminant 2 cos(T sqrt(2E))
    to 1e-8."""
    n = 2001
    pot = SampledPotential(0.0, np.pi / (n - 1), np.zeros(n))
    states = bound_states(pot, (0.1, 5.0))
    worst_rel = float("inf")
    if len(states) == 3:
        worst_rel = max(
            abs(e - k * k / 2.0) / (k * k / 2.0)
            for (e, _, _), k in zip(states, (1, 2, 3))
        )
    flat = SampledPotential(0.0, np.pi / 1024, np.zeros(1025), period=np.pi)
    worst_disc = max(
        abs(hill_discriminant(flat, E) - 2.0 * np.cos(np.pi * np.sqrt(2.0 * E)))
        for E in (0.3, 0.7, 1.3, 2.6, 4.1)
    )
    ok = len(states) == 3 and worst_rel < 1e-6 and worst_disc < 1e-8
    _report(
        "probe-controls",
        ok,
        f"levels={len(states)} (want 3) worst-rel={worst_rel:.3e} tol=1e-06 "
        f"disc={worst_disc:.3e} tol=1e-08",
    )
