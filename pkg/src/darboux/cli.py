"""Command-line orchestrator for the displacement-transformation toolkit.

Subcommands
-----------
elliptic   evaluate a kernel function at a point or on a grid
verify     run residual verification suites (addition law, displacement
           criterion, Riccati pair, intertwining; optional golden vectors)
displace   build one displacement superpotential and its partner potential
chain      run a multi-stage transformation chain
spectrum   analyze a sampled potential: band edges and/or defect levels
figure     end-to-end defect constructions with spectral confirmation

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification
failure.  All file output is deterministic: identical configuration yields
byte-identical CSV/JSON.  An optional config file (``--config``, key=value
lines) supplies defaults; explicit flags always win.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import io as dio
from .chain import (
    ChainSpec,
    ChainStage,
    SOURCE_COMPLEX_DELTA,
    SOURCE_GENERAL,
    SOURCE_ZETA,
    build_double_gap_defect,
    build_single_defect,
    chain_potential,
)
from .elliptic import (
    addition_residual,
    invariants_from_modulus,
    jacobi_sn,
    lame_potential,
    lame_system,
    lattice_distance,
    wp,
    wp_prime,
    weier_sigma,
    weier_zeta,
)
from .engine import (
    displacement_from_energy,
    displacement_residual,
    displacement_residual_for,
    factorization_energy,
    intertwining_residual,
    make_general_superpotential,
    make_zeta_superpotential,
    movable_singularities,
    riccati_residual,
    sample_lame_potential,
)
from .errors import (
    ConsistencyError,
    DarbouxError,
    DegeneratePairError,
    DomainError,
    VerificationError,
)
from .spectral import SpectralReport, band_edges, bound_states, hill_discriminant

__all__ = ["main", "RunConfig"]


class UsageError(Exception):
    """Bad flags or config: exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract is 1
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


@dataclass(frozen=True)
class RunConfig:
    """Validated numeric-run parameters shared by the subcommands."""

    subcommand: str
    m: float | None = None
    delta: complex | None = None
    epsilons: tuple = ()
    gamma: float | None = None
    grid: tuple | None = None  # (xmin, xmax, n)
    tolerances: dict | None = None
    out: str | None = None
    json_out: str | None = None
    plot: bool = False

    def __post_init__(self):
        if self.grid is not None:
            xmin, xmax, n = self.grid
            if not xmin < xmax:
                raise UsageError(f"grid needs xmin < xmax, got {xmin} >= {xmax}")
            if int(n) < 16:
                raise UsageError(f"grid needs n >= 16, got {int(n)}")
        for name, value in (self.tolerances or {}).items():
            if not value > 0:
                raise UsageError(f"tolerance {name} must be positive, got {value}")


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _float_list(text: str, what: str):
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            out.append(None)
            continue
        try:
            out.append(float(part))
        except ValueError:
            raise UsageError(f"{what}: {part!r} is not a decimal number") from None
    return out


def _as_float(value, what: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{what}: {value!r} is not a decimal number") from None


def _as_int(value, what: str) -> int:
    try:
        return int(str(value), 10)
    except (TypeError, ValueError):
        raise UsageError(f"{what}: {value!r} is not an integer") from None


def _require(value, what: str):
    if value is None:
        raise UsageError(f"{what} is required (flag or config file)")
    return value


def _grid_tuple(raw):
    if raw is None:
        return None
    if len(raw) != 3:
        raise UsageError("--grid takes XMIN XMAX N")
    xmin = _as_float(raw[0], "--grid")
    xmax = _as_float(raw[1], "--grid")
    n = _as_float(raw[2], "--grid")
    if abs(n - round(n)) > 0:
        raise UsageError(f"grid point count must be an integer, got {n}")
    return (xmin, xmax, int(round(n)))


def _grid_axis(grid):
    xmin, xmax, n = grid
    return np.linspace(xmin, xmax, n)


def _default_grid(sys, periods: float = 1.5, n: int = 721):
    if math.isfinite(sys.period):
        half = periods * sys.period
    else:
        half = 8.0
    return (-half, half, n)


def _emit_table(header, columns, out_path, plot: bool, plot_fn=None):
    text = dio.format_table(header, columns)
    if out_path:
        with open(out_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if plot:
        if not out_path:
            raise UsageError("--plot needs --out to place the image next to")
        if plot_fn is not None:
            plot_fn(os.path.splitext(out_path)[0] + ".png")


def _emit_json(obj, json_path):
    text = dio.dumps_json(obj)
    if json_path:
        with open(json_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _build_superpotential(sys, delta, gamma):
    if gamma is None:
        return make_zeta_superpotential(sys, delta)
    return make_general_superpotential(sys, delta, gamma)


def _resolve_delta(args, sys):
    """Displacement from --delta / --delta-re,--delta-im / --eps."""
    given = [
        name
        for name, val in (
            ("--delta", args.delta),
            ("--delta-re/--delta-im", args.delta_re if args.delta_re is not None else args.delta_im),
            ("--eps", args.eps),
        )
        if val is not None
    ]
    if len(given) != 1:
        raise UsageError(
            "give the displacement exactly one way: --delta, --delta-re/--delta-im, or --eps"
        )
    if args.delta is not None:
        return complex(_as_float(args.delta, "--delta"), 0.0)
    if args.eps is not None:
        eps_list = _float_list(args.eps, "--eps")
        if len(eps_list) != 1 or eps_list[0] is None:
            raise UsageError("--eps takes exactly one energy here")
        return complex(displacement_from_energy(sys, eps_list[0]))
    re = float(args.delta_re) if args.delta_re is not None else 0.0
    im = float(args.delta_im) if args.delta_im is not None else 0.0
    return complex(re, im)


# ---------------------------------------------------------------------------
# elliptic
# ---------------------------------------------------------------------------

_FN_NAMES = ("wp", "wp_prime", "zeta", "sigma", "sn")


def _kernel_fn(name: str, m: float):
    if name == "sn":
        return lambda z: np.asarray(jacobi_sn(np.real(z), m), dtype=complex)
    inv = invariants_from_modulus(m)
    table = {
        "wp": wp,
        "wp_prime": wp_prime,
        "zeta": weier_zeta,
        "sigma": weier_sigma,
    }
    fn = table[name]
    return lambda z: np.asarray(fn(z, inv), dtype=complex)


def cmd_elliptic(args) -> int:
    cfg = RunConfig(
        subcommand="elliptic",
        m=_as_float(_require(args.m, "--m"), "--m"),
        grid=_grid_tuple(args.grid),
        out=args.out,
        plot=bool(args.plot),
    )
    fn = _kernel_fn(_require(args.fn, "--fn"), cfg.m)

    if cfg.grid is not None:
        if args.re is not None or args.im is not None:
            raise UsageError("--grid and --re/--im are mutually exclusive")
        x = _grid_axis(cfg.grid)
        if args.fn == "sn":
            vals = fn(x)
        else:
            vals = fn(x.astype(complex))
        header = ["x", "re", "im"]
        cols = [x, np.real(vals), np.imag(vals)]

        def plot_fn(path):
            from .plots import render_curves

            render_curves(
                path,
                x,
                {f"{args.fn} re": np.real(vals), f"{args.fn} im": np.imag(vals)},
                ylabel=args.fn,
                title=f"{args.fn}, m={cfg.m:g}",
            )

        _emit_table(header, cols, cfg.out, cfg.plot, plot_fn)
        return 0

    if args.re is None:
        raise UsageError("point mode needs --re (and optional --im); or pass --grid")
    z = complex(float(args.re), float(args.im or 0.0))
    if args.fn == "sn" and z.imag != 0.0:
        raise UsageError("sn is evaluated on the real axis only (--im must be 0)")
    val = complex(fn(np.array([z]))[0])
    if cfg.out:
        dio.write_table(cfg.out, ["re", "im"], [[val.real], [val.imag]])
    else:
        sys.stdout.write(
            f"{dio.format_float(val.real)},{dio.format_float(val.imag)}\n"
        )
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _suite_addition(sys, rng, n_pairs, tol):
    inv = sys.inv
    hi = min(inv.omega, 3.0) - 0.15 if math.isfinite(inv.omega) else 2.5
    worst = 0.0
    branches = ("S", "R") if inv.kind == "generic" else ("S",)
    for branch in branches:
        done = 0
        attempts = 0
        while done < n_pairs and attempts < 50 * n_pairs:
            attempts += 1
            u, v = rng.uniform(0.15, hi, size=2)
            try:
                r = addition_residual(u, v, inv, branch=branch)
            except DegeneratePairError:
                continue
            worst = max(worst, r)
            done += 1
        if done < n_pairs:
            raise DomainError(
                f"could not draw {n_pairs} non-degenerate pairs on branch {branch}"
            )
    return worst, tol


def _suite_displacement(sys, deltas, tol):
    worst = 0.0
    for d in deltas:
        spread, eps = displacement_residual(sys, d)
        target = factorization_energy(complex(d, 0.0), sys)
        worst = max(worst, spread, abs(eps - target))
    return worst, tol


def _riccati_grid(sys, delta):
    if math.isfinite(sys.period):
        x = np.linspace(-1.5 * sys.period, 1.5 * sys.period, 801)
    else:
        x = np.linspace(-8.0 - abs(delta), 8.0, 801)
    keep = (lattice_distance(x, sys.inv) > 0.15) & (
        lattice_distance(x + delta, sys.inv) > 0.15
    )
    return x[keep]


def _suite_riccati(sys, deltas, tol):
    worst = 0.0
    for d in deltas:
        alpha = make_zeta_superpotential(sys, d)
        x = _riccati_grid(sys, d)
        a = alpha.alpha(x)
        ap = alpha.alpha_prime(x)
        v0 = lame_potential(x, sys)
        v1 = lame_potential(x + d, sys)
        worst = max(
            worst,
            riccati_residual(a, ap, v0, alpha.epsilon, "forward"),
            riccati_residual(a, ap, v1, alpha.epsilon, "backward"),
        )
    return worst, tol


def _suite_intertwining(sys, deltas, tol):
    worst = 0.0
    for d in deltas:
        alpha = make_zeta_superpotential(sys, d)
        worst = max(worst, intertwining_residual(alpha, sys))
    return worst, tol


def _suite_harmonic_control(deltas, tol):
    # Negative control: a potential with no displacement symmetry must fail
    # the criterion, by design.
    d = deltas[0] if deltas else 0.7
    x = np.linspace(-3.0, 3.0, 481)
    spread, _ = displacement_residual_for(
        lambda t: 0.5 * t * t, lambda t: t, d, x
    )
    return spread, tol


def _suite_golden(path, tol):
    if not path:
        raise UsageError(
            "golden verification needs --golden-file or the DARBOUX_GOLDEN env var"
        )
    if not os.path.exists(path):
        raise DomainError(f"golden vector file not found: {path}")
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    worst = 0.0
    n_rec = 0
    fns = {}
    for ln in lines:
        parts = ln.split(",")
        if parts[0] == "fn":
            continue  # header
        if len(parts) != 6:
            raise DomainError(f"golden record needs 6 fields, got {len(parts)}: {ln!r}")
        name, m_s, zr, zi, vr, vi = parts
        if name not in _FN_NAMES:
            raise DomainError(f"unknown golden function {name!r}")
        m = float(m_s)
        z = complex(float(zr), float(zi))
        expected = complex(float(vr), float(vi))
        got = complex(_kernel_fn(name, m)(np.array([z]))[0])
        rel = abs(got - expected) / max(1.0, abs(expected))
        worst = max(worst, rel)
        fns[name] = max(fns.get(name, 0.0), rel)
        n_rec += 1
    if n_rec == 0:
        raise DomainError(f"golden vector file {path} holds no records")
    return worst, tol


def cmd_verify(args) -> int:
    tols = {
        "addition": float(args.tol_addition),
        "displacement": float(args.tol_displacement),
        "riccati": float(args.tol_riccati),
        "intertwining": float(args.tol_intertwining),
        "golden": float(args.tol_golden),
    }
    RunConfig(subcommand="verify", tolerances=tols)
    deltas = [d for d in _float_list(args.deltas, "--deltas") if d is not None]
    if not deltas:
        raise UsageError("--deltas needs at least one displacement")

    results = []  # (name, worst, tol)
    if args.golden:
        path = args.golden_file or os.environ.get("DARBOUX_GOLDEN", "")
        results.append(("golden-vectors", *_suite_golden(path, tols["golden"])))
    elif args.potential == "harmonic":
        results.append(
            ("displacement-criterion", *_suite_harmonic_control(deltas, tols["displacement"]))
        )
    else:
        sys_ = lame_system(float(args.m))
        rng = np.random.default_rng(int(args.seed))
        results.append(
            ("addition-law", *_suite_addition(sys_, rng, int(args.pairs), tols["addition"]))
        )
        results.append(
            ("displacement-criterion", *_suite_displacement(sys_, deltas, tols["displacement"]))
        )
        results.append(("riccati-pair", *_suite_riccati(sys_, deltas, tols["riccati"])))
        results.append(
            ("intertwining", *_suite_intertwining(sys_, deltas, tols["intertwining"]))
        )

    failed = []
    for name, worst, tol in results:
        status = "PASS" if worst < tol else "FAIL"
        if status == "FAIL":
            failed.append((name, worst, tol))
        sys.stdout.write(f"{status}  {name}  worst={worst:.3e}  tol={tol:g}\n")
    if failed:
        name, worst, tol = max(failed, key=lambda t: t[1] / t[2])
        sys.stdout.write(
            f"FAILED: worst offender: {name} (residual {worst:.3e}, tolerance {tol:g})\n"
        )
        return 3
    sys.stdout.write("OK\n")
    return 0


# ---------------------------------------------------------------------------
# displace
# ---------------------------------------------------------------------------


def cmd_displace(args) -> int:
    sys_ = lame_system(_as_float(_require(args.m, "--m"), "--m"))
    cfg = RunConfig(
        subcommand="displace",
        m=sys_.m,
        grid=_grid_tuple(args.grid) or _default_grid(sys_),
        gamma=_as_float(args.gamma, "--gamma") if args.gamma is not None else None,
        out=args.out,
        json_out=args.json,
        plot=bool(args.plot),
    )
    delta = _resolve_delta(args, sys_)
    alpha = _build_superpotential(sys_, delta, cfg.gamma)
    eps = alpha.epsilon

    x = _grid_axis(cfg.grid)
    a = alpha.alpha(x)
    ap = alpha.alpha_prime(x)
    v = lame_potential(x, sys_)
    v_shift = np.real(wp(x + delta + 1j * sys_.inv.tau, sys_.inv))
    v_tilde = v + ap
    residual = np.abs(-ap + a * a - 2.0 * (v - eps))

    sing = []
    if cfg.gamma is not None and cfg.gamma != 0.0:
        sing = list(
            movable_singularities(sys_, delta, cfg.gamma, float(x[0]), float(x[-1]))
        )

    header = ["x", "V", "V_shifted", "alpha", "alpha_prime", "V_tilde", "residual"]
    cols = [x, v, v_shift, a, ap, v_tilde, residual]

    def plot_fn(path):
        from .plots import render_curves

        render_curves(
            path,
            x,
            {"V": v, "V_tilde": v_tilde},
            ylabel="potential",
            title=f"displacement partner, m={sys_.m:g}",
        )

    _emit_table(header, cols, cfg.out, cfg.plot, plot_fn)
    if cfg.json_out:
        _emit_json(
            {
                "m": sys_.m,
                "delta": {"re": delta.real, "im": delta.imag},
                "epsilon": eps,
                "gamma": cfg.gamma,
                "form": alpha.form,
                "movable_singularities": sing,
            },
            cfg.json_out,
        )
    return 0


# ---------------------------------------------------------------------------
# chain
# ---------------------------------------------------------------------------


def _chain_stages(sys_, eps_list, gamma_list):
    stages = []
    for i, eps in enumerate(eps_list):
        gamma = gamma_list[i] if i < len(gamma_list) else None
        in_gap = sys_.E1 + 1e-12 < eps < sys_.E1p - 1e-12
        if gamma is not None:
            stages.append(ChainStage(epsilon=eps, source=SOURCE_GENERAL, gamma=gamma))
        elif in_gap:
            delta = displacement_from_energy(sys_, eps)
            stages.append(
                ChainStage(
                    epsilon=eps, source=SOURCE_COMPLEX_DELTA, kappa=float(delta.real)
                )
            )
        else:
            stages.append(ChainStage(epsilon=eps, source=SOURCE_ZETA))
    return tuple(stages)


def _chain_artifacts(tp, out, json_out, plot, m):
    x = tp.base.x
    v_base = tp.base.values
    v_stage1 = v_base + tp.stage_contributions[0]
    v_final = tp.final.values
    header = ["x", "V_base", "V_stage1", "V_final"]
    cols = [x, v_base, v_stage1, v_final]

    def plot_fn(path):
        from .plots import render_curves

        render_curves(
            path,
            x,
            {"V_base": v_base, "V_stage1": v_stage1, "V_final": v_final},
            ylabel="potential",
            title=f"transformation chain, m={m:g}",
            hlines=tp.energies,
        )

    _emit_table(header, cols, out, plot, plot_fn)
    summary = {
        "m": m,
        "energies": list(tp.energies),
        "stages": [dict(info) for info in tp.stage_info],
        "singularities": list(tp.singularities),
        "residual_maxima": dict(tp.residuals),
    }
    if json_out:
        _emit_json(summary, json_out)
    return summary


def cmd_chain(args) -> int:
    sys_ = lame_system(_as_float(_require(args.m, "--m"), "--m"))
    cfg = RunConfig(
        subcommand="chain",
        m=sys_.m,
        grid=_grid_tuple(args.grid) or _default_grid(sys_, periods=1.5, n=721),
        out=args.out,
        json_out=args.json,
        plot=bool(args.plot),
    )
    eps_list = [
        e for e in _float_list(_require(args.eps, "--eps"), "--eps") if e is not None
    ]
    if not eps_list:
        raise UsageError("--eps needs at least one stage energy")
    gamma_list = _float_list(args.gammas, "--gammas") if args.gammas else []

    xmin, xmax, n = cfg.grid
    spec = ChainSpec(
        sys=sys_,
        stages=_chain_stages(sys_, eps_list, gamma_list),
        grid=(xmin, (xmax - xmin) / (n - 1), n),
    )
    tp = chain_potential(spec)
    _chain_artifacts(tp, cfg.out, cfg.json_out, cfg.plot, sys_.m)
    return 0


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


def cmd_spectrum(args) -> int:
    cfg = RunConfig(
        subcommand="spectrum",
        out=args.out,
        plot=bool(args.plot),
        tolerances={"edges": float(args.tol_edges)},
    )
    if args.bands is None and args.window is None:
        raise UsageError("give --bands N and/or --window LO HI")
    pot = dio.read_potential_csv(
        _require(args.input, "--input"),
        column=args.column,
        period=_as_float(args.period, "--period") if args.period is not None else None,
        detect=not args.no_detect,
    )

    edges = []
    samples = []
    if args.bands is not None:
        n_edges = _as_int(args.bands, "--bands")
        if n_edges < 1:
            raise UsageError("--bands must be at least 1")
        if pot.period is None:
            raise DomainError(
                "band analysis needs a periodic potential: none detected and no "
                "--period given"
            )
        vmin = float(np.min(pot.values))
        vmax = float(np.max(pot.values))
        span = max(vmax - vmin, 1.0)
        if args.scan is not None:
            lo = _as_float(args.scan[0], "--scan")
            hi = _as_float(args.scan[1], "--scan")
        else:
            lo, hi = vmin - 0.5 * span, vmax + span
        edges, (es, disc) = band_edges(
            pot, (lo, hi), tol=cfg.tolerances["edges"], return_samples=True
        )
        while len(edges) < n_edges and args.scan is None and hi - lo < 41.0 * span:
            hi += span
            edges, (es, disc) = band_edges(
                pot, (lo, hi), tol=cfg.tolerances["edges"], return_samples=True
            )
        edges = edges[:n_edges]
        samples = list(zip(es.tolist(), disc.tolist()))

    states = []
    if args.window is not None:
        w_lo = _as_float(args.window[0], "--window")
        w_hi = _as_float(args.window[1], "--window")
        states = bound_states(pot, (w_lo, w_hi))
        if pot.period is not None and not samples:
            es = np.linspace(w_lo, w_hi, 97)
            disc = hill_discriminant(pot, es)
            samples = list(zip(es.tolist(), disc.tolist()))

    report = SpectralReport(
        band_edges=tuple(edges),
        bound_states=tuple(states),
        discriminant_samples=tuple(samples),
    )
    _emit_json(report.to_dict(), cfg.out)
    if cfg.plot:
        if not cfg.out:
            raise UsageError("--plot needs --out to place the image next to")
        from .plots import render_curves, render_discriminant

        png = os.path.splitext(cfg.out)[0] + ".png"
        if samples:
            es, disc = zip(*samples)
            render_discriminant(
                png,
                np.asarray(es),
                np.asarray(disc),
                edges=edges,
                bound_energies=[e for e, _, _ in states],
            )
        else:
            render_curves(
                png, pot.x, {pot.label or "V": pot.values}, ylabel="potential"
            )
    return 0


# ---------------------------------------------------------------------------
# figure
# ---------------------------------------------------------------------------


def cmd_figure(args) -> int:
    sys_ = lame_system(_as_float(_require(args.m, "--m"), "--m"))
    cfg = RunConfig(
        subcommand="figure",
        m=sys_.m,
        grid=_grid_tuple(args.grid),
        out=args.out,
        json_out=args.json,
        plot=bool(args.plot),
    )
    eps_list = [
        e for e in _float_list(_require(args.eps, "--eps"), "--eps") if e is not None
    ]
    gamma_list = _float_list(args.gammas, "--gammas") if args.gammas else []

    if args.which == "fig1":
        if len(eps_list) != 1:
            raise UsageError("fig1 takes exactly one --eps energy (below the spectrum)")
        eps = eps_list[0]
        gamma = gamma_list[0] if gamma_list else None
        tp = build_single_defect(sys_.m, eps, gamma=gamma, grid=cfg.grid)
        window = (eps - 0.15, min(eps + 0.15, sys_.E0 - 1e-3))
        expected = [eps]
    else:
        if len(eps_list) != 2:
            raise UsageError("fig2 takes exactly two --eps energies (inside the gap)")
        e1, e2 = eps_list
        pair = tuple(gamma_list[:2]) if len(gamma_list) >= 2 else None
        tp = build_double_gap_defect(sys_.m, e1, e2, grid=cfg.grid, gamma_pair=pair)
        gap = sys_.E1p - sys_.E1
        window = (
            max(sys_.E1 + 0.004 * gap, min(eps_list) - 0.3 * gap),
            min(sys_.E1p - 0.004 * gap, max(eps_list) + 0.3 * gap),
        )
        expected = sorted(eps_list)

    states = bound_states(tp.final, window)
    found = sorted(e for e, _, _ in states)
    errors = (
        [abs(f - e) for f, e in zip(found, sorted(expected))]
        if len(found) == len(expected)
        else []
    )
    confirmed = len(found) == len(expected) and all(err <= 1e-3 for err in errors)

    summary = _chain_artifacts(tp, cfg.out, None, cfg.plot, sys_.m)
    summary["spectral_confirmation"] = {
        "window": list(window),
        "expected_energies": sorted(expected),
        "found_states": [
            {"energy": e, "nodes": n, "residual": r} for e, n, r in states
        ],
        "confirmed": bool(confirmed),
    }
    if cfg.json_out:
        _emit_json(summary, cfg.json_out)
    if not confirmed:
        raise VerificationError(
            f"bound-state confirmation failed: expected levels {sorted(expected)} "
            f"in window {window}, found {found}"
        )
    return 0


# ---------------------------------------------------------------------------
# Parser and config plumbing
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    p = _Parser(
        prog="darboux",
        description="Displacement transformations of periodic potentials, "
        "with residual verification and an independent spectral probe.",
    )
    p.add_argument("--config", default=None, help="key=value defaults file")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common_out(q, json_too=True):
        q.add_argument("--out", default=None, help="output CSV path (default: stdout)")
        if json_too:
            q.add_argument("--json", default=None, help="JSON summary path")
        q.add_argument(
            "--plot", action="store_true", default=False,
            help="render a PNG next to --out",
        )

    q = sub.add_parser("elliptic", help="evaluate a kernel function")
    q.add_argument("--m", default=None, type=float, help="modulus in [0, 1]")
    q.add_argument("--fn", default=None, choices=_FN_NAMES)
    q.add_argument("--re", default=None, type=float, help="point mode: real part")
    q.add_argument("--im", default=None, type=float, help="point mode: imaginary part")
    q.add_argument(
        "--grid", nargs=3, default=None, metavar=("XMIN", "XMAX", "N"),
        help="grid mode over the real axis",
    )
    add_common_out(q, json_too=False)
    q.set_defaults(handler=cmd_elliptic)

    q = sub.add_parser("verify", help="run residual verification suites")
    q.add_argument("--m", default=0.5, type=float)
    q.add_argument("--deltas", default="0.3,0.7,1.1", help="comma-separated displacements")
    q.add_argument(
        "--potential", default="lame", choices=("lame", "harmonic"),
        help="'harmonic' is the designed-to-fail negative control",
    )
    q.add_argument("--golden", action="store_true", default=False,
                   help="check the kernel against golden vectors")
    q.add_argument("--golden-file", default=None,
                   help="golden vector file (default: $DARBOUX_GOLDEN)")
    q.add_argument("--seed", default=0, type=int)
    q.add_argument("--pairs", default=100, type=int, help="addition-law sample pairs")
    q.add_argument("--tol-addition", default=1e-8, type=float)
    q.add_argument("--tol-displacement", default=1e-8, type=float)
    q.add_argument("--tol-riccati", default=1e-9, type=float)
    q.add_argument("--tol-intertwining", default=1e-8, type=float)
    q.add_argument("--tol-golden", default=1e-12, type=float)
    q.set_defaults(handler=cmd_verify)

    q = sub.add_parser("displace", help="one displacement superpotential + partner")
    q.add_argument("--m", default=None, type=float)
    q.add_argument("--delta", default=None, help="real displacement")
    q.add_argument("--delta-re", default=None, type=float)
    q.add_argument("--delta-im", default=None, type=float)
    q.add_argument("--eps", default=None, help="factorization energy instead of delta")
    q.add_argument("--gamma", default=None, help="mixing parameter (general solution)")
    q.add_argument("--grid", nargs=3, default=None, metavar=("XMIN", "XMAX", "N"))
    add_common_out(q)
    q.set_defaults(handler=cmd_displace)

    q = sub.add_parser("chain", help="multi-stage transformation chain")
    q.add_argument("--m", default=None, type=float)
    q.add_argument("--eps", default=None, help="comma-separated stage energies")
    q.add_argument("--gammas", default=None,
                   help="per-stage mixing parameters (empty slot = pure form)")
    q.add_argument("--grid", nargs=3, default=None, metavar=("XMIN", "XMAX", "N"))
    add_common_out(q)
    q.set_defaults(handler=cmd_chain)

    q = sub.add_parser("spectrum", help="band edges / defect levels of a sampled potential")
    q.add_argument("--input", default=None, help="potential CSV (needs an 'x' column)")
    q.add_argument("--column", default=None, help="value column name (default: last)")
    q.add_argument("--period", default=None, help="override period detection")
    q.add_argument("--no-detect", action="store_true", default=False,
                   help="disable period detection")
    q.add_argument("--bands", default=None, help="number of band edges to locate")
    q.add_argument("--scan", nargs=2, default=None, metavar=("LO", "HI"),
                   help="explicit energy range for the edge scan")
    q.add_argument("--window", nargs=2, default=None, metavar=("LO", "HI"),
                   help="energy window for defect bound states")
    q.add_argument("--tol-edges", default=1e-6, type=float)
    q.add_argument("--out", default=None, help="report JSON path (default: stdout)")
    q.add_argument("--plot", action="store_true", default=False)
    q.set_defaults(handler=cmd_spectrum)

    q = sub.add_parser("figure", help="end-to-end defect construction + confirmation")
    q.add_argument("which", choices=("fig1", "fig2"))
    q.add_argument("--m", default=None, type=float)
    q.add_argument("--eps", default=None,
                   help="defect energy (fig1) or two gap energies (fig2)")
    q.add_argument("--gammas", default=None, help="override the mixing-parameter search")
    q.add_argument("--grid", nargs=3, default=None, metavar=("XMIN", "XMAX", "N"))
    add_common_out(q)
    q.set_defaults(handler=cmd_figure)

    # Subparsers parse into a fresh namespace (and copy the result over), so
    # config-file defaults must be installed on each of them, not only on
    # the top-level parser.
    p._sub_parsers = dict(sub.choices)
    return p


_CONFIG_CONVERTERS = {
    "m": float, "fn": str, "re": float, "im": float,
    "grid": lambda s: [float(t) for t in s.split()],
    "scan": lambda s: [float(t) for t in s.split()],
    "window": lambda s: [float(t) for t in s.split()],
    "out": str, "json": str, "input": str, "column": str,
    "plot": lambda s: s.lower() in ("1", "true", "yes"),
    "no_detect": lambda s: s.lower() in ("1", "true", "yes"),
    "golden": lambda s: s.lower() in ("1", "true", "yes"),
    "golden_file": str, "potential": str,
    "deltas": str, "delta": str, "delta_re": float, "delta_im": float,
    "eps": str, "gamma": str, "gammas": str, "kappa": float,
    "period": str, "bands": str, "seed": int, "pairs": int,
    "tol_addition": float, "tol_displacement": float, "tol_riccati": float,
    "tol_intertwining": float, "tol_golden": float, "tol_edges": float,
}


def _read_config(path: str) -> dict:
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    out = {}
    with open(path, "r", encoding="ascii") as fh:
        for ln_no, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{ln_no}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _CONFIG_CONVERTERS:
                raise UsageError(f"{path}:{ln_no}: unknown config key {key!r}")
            try:
                out[key] = _CONFIG_CONVERTERS[key](value.strip())
            except ValueError:
                raise UsageError(
                    f"{path}:{ln_no}: bad value for {key}: {value.strip()!r}"
                ) from None
    return out


def _extract_config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a path")
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        parser = _build_parser()
        cfg_path = _extract_config_path(argv)
        if cfg_path:
            defaults = _read_config(cfg_path)
            parser.set_defaults(**defaults)
            for sub in parser._sub_parsers.values():
                sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
        rc = args.handler(args)
        return int(rc or 0)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except SystemExit as exc:  # --help
        code = exc.code
        return int(code) if isinstance(code, int) else 0
    except (VerificationError, ConsistencyError) as exc:
        sys.stderr.write(f"verification failure: {exc}\n")
        return 3
    except DarbouxError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
