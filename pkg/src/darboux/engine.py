"""Displacement superpotentials and their residual verifiers.

A displacement superpotential alpha(x) intertwines the Hamiltonian
H = -1/2 d^2/dx^2 + V(x) with its shifted copy at V(x + delta).  It solves
the pair of Riccati equations

    -alpha' + alpha^2 = 2 (V(x) - epsilon)
    +alpha' + alpha^2 = 2 (V(x + delta) - epsilon)

whose sum and difference give the two closed forms implemented here: the
square-root form  alpha = sign * sqrt(V(x) + V(x+delta) - 2 epsilon)  and the
quasi-periodic form  alpha = zeta(x^) - zeta(x^ + delta) + zeta(delta)  with
x^ = x + i*tau the bounded-branch argument.  The one-parameter family of all
Riccati solutions at the same energy is produced by mixing the two
displacement solutions at +/- delta through an auxiliary exponential-sigma
quotient.  Every construction here is verified by residual operations that
recompute the defining equations from independently evaluated pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .elliptic import (
    LameSystem,
    lame_potential,
    lame_potential_prime,
    lame_system,
    lattice_distance,
    weier_sigma_parts,
    weier_zeta,
    wp,
    wp_prime,
)
from .errors import (
    ConsistencyError,
    DomainError,
    SingularStepError,
)

__all__ = [
    "FORM_GENERAL",
    "FORM_SQRT",
    "FORM_ZETA",
    "SampledPotential",
    "Superpotential",
    "TestFunction",
    "default_test_functions",
    "displaced_potential",
    "displacement_from_energy",
    "displacement_residual",
    "displacement_residual_for",
    "factorization_energy",
    "general_riccati_solution",
    "intertwining_residual",
    "make_general_superpotential",
    "make_sqrt_superpotential",
    "make_zeta_superpotential",
    "movable_singularities",
    "riccati_residual",
    "sample_lame_potential",
    "superpotential_sqrt",
    "superpotential_zeta",
]

FORM_SQRT = "sqrt"
FORM_ZETA = "zeta"
FORM_GENERAL = "general"

#: Relative guard band around vanishing denominators in residual sweeps.
DENOM_GUARD = 1e-6
#: Spread of the imaginary part beyond which a "real" result is rejected.
REALITY_TOL = 1e-8


# ---------------------------------------------------------------------------
# Sampled potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SampledPotential:
    """A potential sampled on the uniform grid x_i = x0 + i*dx, i = 0..n-1.

    ``period`` is set only when the samples themselves are periodic;
    ``background_period`` records the period of the asymptotic background of
    a localized-defect potential (used by spectral boundary conditions).
    """

    x0: float
    dx: float
    values: np.ndarray
    period: float | None = None
    label: str = ""
    background_period: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if self.dx <= 0.0:
            raise DomainError(f"grid step must be positive, got {self.dx}")
        if values.ndim != 1 or values.size < 2:
            raise DomainError("potential samples must form a 1-D grid of >= 2 points")
        if not np.all(np.isfinite(values)):
            bad = np.flatnonzero(~np.isfinite(values))
            raise ConsistencyError(
                f"potential samples contain {bad.size} non-finite values "
                f"(first at x={self.x0 + self.dx * bad[0]:.6g})"
            )
        if self.period is not None:
            self._check_periodicity()

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.values.size)

    @property
    def x_end(self) -> float:
        return self.x0 + self.dx * (self.values.size - 1)

    def _check_periodicity(self, tol: float = 1e-8):
        steps = self.period / self.dx
        k = int(round(steps))
        if k < 1 or abs(steps - k) > 1e-6:
            # Period not commensurate with the grid: nothing to compare.
            return
        if k >= self.values.size:
            return
        diff = np.max(np.abs(self.values[k:] - self.values[:-k]))
        if diff > tol:
            raise ConsistencyError(
                f"samples declared periodic with T={self.period:.6g} differ by "
                f"{diff:.3e} (> {tol:g}) one period apart"
            )

    def value_at(self, xq: float) -> float:
        """Linear interpolation (grid hits are exact)."""
        pos = (xq - self.x0) / self.dx
        i = int(math.floor(pos))
        if i < 0 or i >= self.values.size - 1:
            if abs(pos - (self.values.size - 1)) < 1e-9:
                return float(self.values[-1])
            raise DomainError(f"x={xq} outside the sampled range")
        frac = pos - i
        return float((1.0 - frac) * self.values[i] + frac * self.values[i + 1])


def sample_lame_potential(
    sys: LameSystem,
    x0: float,
    dx: float,
    n: int,
    label: str = "",
) -> SampledPotential:
    """Sample the base periodic potential on a uniform grid."""
    x = x0 + dx * np.arange(n)
    period = sys.period if math.isfinite(sys.period) else None
    return SampledPotential(
        x0=x0,
        dx=dx,
        values=np.asarray(lame_potential(x, sys), dtype=np.float64),
        period=period,
        label=label or f"modulus-{sys.m:g} potential",
    )


# ---------------------------------------------------------------------------
# Factorization energies and displacements
# ---------------------------------------------------------------------------


def factorization_energy(delta, sys: LameSystem) -> float:
    """epsilon(delta) = -p(delta)/2 on the pole-bearing branch; real for
    real delta and for delta = i*tau + kappa."""
    value = -0.5 * wp(delta, sys.inv)
    if abs(value.imag) > 1e-10:
        raise DomainError(
            f"factorization energy at delta={delta} has imaginary part "
            f"{value.imag:.3e} (> 1e-10); use a real delta or i*tau + kappa"
        )
    return float(value.real)


def displacement_from_energy(sys: LameSystem, epsilon: float) -> complex:
    """Invert epsilon(delta) = -p(delta)/2 for the displacement.

    Energies at or below the lowest band edge map to a real delta in
    (0, omega]; energies inside the finite gap map to delta = i*tau + kappa
    with kappa in (0, omega).  Energies inside an allowed band are rejected.
    """
    inv = sys.inv
    target = -2.0 * epsilon

    if abs(epsilon - sys.E0) <= 1e-12 * max(1.0, abs(sys.E0)) and math.isfinite(inv.omega):
        # At the band-edge energy the inversion target sits at the flat
        # minimum of p on (0, omega], where bisection would lose half the
        # digits; the displacement is the half-period exactly.
        return float(inv.omega)

    if epsilon <= sys.E0 + 1e-13:
        if sys.m == 1.0:
            # p(delta) = 1/3 + 1/sinh^2(delta) on the double-root lattice.
            arg = target - 1.0 / 3.0
            if arg <= 0.0:
                raise DomainError("energy above the single-well edge")
            return float(math.asinh(1.0 / math.sqrt(arg)))
        lo, hi = 1e-5, inv.omega
        flo = wp(lo, inv).real - target
        fhi = wp(hi, inv).real - target
        if flo < 0.0:
            raise DomainError(f"energy {epsilon} too deep for the bracket")
        if fhi > 1e-9:
            raise DomainError(f"energy {epsilon} does not reach p(omega)=e1")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if wp(mid, inv).real - target > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-15 * max(1.0, hi):
                break
        return float(0.5 * (lo + hi))

    if sys.E1 < epsilon < sys.E1p:
        if not math.isfinite(inv.tau):
            raise DomainError("no finite-gap displacement exists at modulus 0")
        # p(i*tau + kappa) runs monotonically from e3 (kappa=0) to e2 (kappa=omega).
        omega_cap = inv.omega if math.isfinite(inv.omega) else 40.0
        lo, hi = 0.0, omega_cap
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            val = wp(complex(mid, inv.tau), inv).real
            if val < target:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-15 * max(1.0, hi):
                break
        kappa = 0.5 * (lo + hi)
        return complex(kappa, inv.tau)

    raise DomainError(
        f"energy {epsilon} lies in an allowed band of the modulus-{sys.m:g} "
        f"system (edges {sys.E0:.6g}, {sys.E1:.6g}, {sys.E1p:.6g})"
    )


# ---------------------------------------------------------------------------
# Reality bookkeeping
# ---------------------------------------------------------------------------


def _project_real(values: np.ndarray, what: str, tol: float = REALITY_TOL):
    """Drop a constant imaginary part; reject a non-constant one.

    The spread allowance scales with the magnitude of the real part:
    genuine branch errors are order-one relative to the values, while
    rounding noise near poles grows with the values themselves."""
    im = values.imag
    spread = float(im.max() - im.min()) if im.size else 0.0
    scale = float(np.max(np.abs(values.real))) if values.size else 0.0
    if spread > tol * max(1.0, scale):
        raise ConsistencyError(
            f"{what} has a non-constant imaginary part (spread {spread:.3e} "
            f"> {tol:g} at scale {scale:.3g}); branch bookkeeping is inconsistent"
        )
    return values.real


# ---------------------------------------------------------------------------
# Closed-form superpotentials
# ---------------------------------------------------------------------------


def _zeta_constant(delta: complex, sys: LameSystem) -> complex:
    """Additive constant of the quasi-periodic form, with a safety net.

    The constant zeta(delta) is checked against the squared-form relation
    alpha^2 = V + V(.+delta) - 2 epsilon at the reference point x* = omega/3
    (x* = 1 when the real period is infinite) and re-solved from it if the
    check fails; the result is verified globally by the caller's tests.
    """
    inv = sys.inv
    c0 = weier_zeta(delta, inv)
    xs = inv.omega / 3.0 if math.isfinite(inv.omega) else 1.0
    xh = xs + 1j * inv.tau
    f = weier_zeta(xh, inv) - weier_zeta(xh + delta, inv)
    eps = factorization_energy(delta, sys)
    rhs = (wp(xh, inv) + wp(xh + delta, inv) - 2.0 * eps).real
    residual = abs((f + c0) ** 2 - rhs)
    if residual <= 1e-8 * max(1.0, abs(rhs)):
        return c0
    if rhs < 0.0:
        raise ConsistencyError(
            f"squared-form radicand {rhs:.3e} negative at the reference point"
        )
    root = math.sqrt(rhs)
    candidates = (-f + root, -f - root)
    c = min(candidates, key=lambda cc: abs(cc - c0))
    if abs((f + c) ** 2 - rhs) > 1e-8 * max(1.0, abs(rhs)):
        raise ConsistencyError(
            "could not fix the additive constant of the quasi-periodic form"
        )
    return c


def _zeta_alpha_complex(x: np.ndarray, delta: complex, sys: LameSystem, constant: complex):
    """Quasi-periodic-form alpha on the bounded branch, complex-valued."""
    inv = sys.inv
    xh = x + 1j * inv.tau
    return weier_zeta(xh, inv) - weier_zeta(xh + delta, inv) + constant


def _check_gap_pole_clearance(x: np.ndarray, delta: complex, sys: LameSystem):
    """For in-gap displacements the shifted argument returns to the real
    axis, so grid points must keep clear of its lattice poles."""
    inv = sys.inv
    dist = lattice_distance(x + 1j * inv.tau + delta, inv)
    dist = np.minimum(dist, lattice_distance(x + 1j * inv.tau - delta, inv))
    worst = float(np.min(dist))
    if worst < 1e-4:
        bad = x[dist < 1e-4]
        raise SingularStepError(
            f"grid passes within {worst:.2e} of a superpotential pole; "
            f"offset the grid",
            abscissae=bad[:8].tolist(),
        )


# ---------------------------------------------------------------------------
# Superpotential descriptor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Superpotential:
    """Analytic descriptor of one Riccati solution alpha(x).

    ``form`` selects the evaluation procedure: "sqrt" (signed square root of
    the summed Riccati pair), "zeta" (quasi-periodic closed form), or
    "general" (one-parameter mixture of the two displacement solutions with
    mixing parameter ``gamma``; gamma = 0 reproduces the "zeta" form).
    """

    delta: complex
    epsilon: float
    sys: LameSystem
    form: str = FORM_ZETA
    gamma: float | None = None
    sign: int = 1
    constant: complex = field(default=0j, repr=False)

    def __post_init__(self):
        if self.form not in (FORM_SQRT, FORM_ZETA, FORM_GENERAL):
            raise DomainError(f"unknown superpotential form {self.form!r}")
        if self.sign not in (-1, 1):
            raise DomainError("sign must be +1 or -1")
        if self.form == FORM_GENERAL and self.gamma is None:
            raise DomainError("the general form requires a mixing parameter gamma")
        if self.form in (FORM_ZETA, FORM_GENERAL):
            check = factorization_energy(self.delta, self.sys)
            if abs(check - self.epsilon) > 1e-10 * max(1.0, abs(check)):
                raise ConsistencyError(
                    f"energy {self.epsilon} does not match the displacement "
                    f"(expected {check})"
                )

    # -- evaluation ---------------------------------------------------------

    def alpha(self, x):
        x_arr, scalar = _as_float_array(x)
        vals = self._values(x_arr, order=0)
        return float(vals[0]) if scalar else vals

    def alpha_prime(self, x):
        x_arr, scalar = _as_float_array(x)
        vals = self._values(x_arr, order=1)
        return float(vals[0]) if scalar else vals

    def alpha_second(self, x, dx: float = 1e-3):
        """Second derivative: analytic for the "zeta" form, five-point
        stencil of the analytic first derivative otherwise."""
        x_arr, scalar = _as_float_array(x)
        if self.form == FORM_ZETA:
            inv = self.sys.inv
            xh = x_arr + 1j * inv.tau
            vals = _project_real(
                wp_prime(xh + self.delta, inv) - wp_prime(xh, inv),
                "second derivative of the superpotential",
            )
        else:
            offsets = np.array([-2.0, -1.0, 1.0, 2.0]) * dx
            weights = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * dx)
            vals = sum(
                w * self._values(x_arr + o, order=1)
                for w, o in zip(weights, offsets)
            )
        return float(vals[0]) if scalar else vals

    # -- internals ----------------------------------------------------------

    def _values(self, x: np.ndarray, order: int) -> np.ndarray:
        if self.form == FORM_SQRT:
            return self._sqrt_values(x, order)
        if self.form == FORM_ZETA:
            return self._zeta_values(x, order)
        return self._general_values(x, order)

    def _sqrt_values(self, x: np.ndarray, order: int) -> np.ndarray:
        sys = self.sys
        if abs(self.delta.imag) > 0.0:
            raise DomainError("the square-root form requires a real displacement")
        d = self.delta.real
        v0 = lame_potential(x, sys)
        v1 = lame_potential(x + d, sys)
        rad = v0 + v1 - 2.0 * self.epsilon
        if float(rad.min()) < -1e-12:
            raise ConsistencyError(
                f"negative radicand {float(rad.min()):.3e} in the square-root "
                "form: wrong energy or no displacement property"
            )
        rad = np.maximum(rad, 0.0)
        if order == 0:
            return self.sign * np.sqrt(rad)
        dv0 = lame_potential_prime(x, sys)
        dv1 = lame_potential_prime(x + d, sys)
        root = np.sqrt(rad)
        tiny = root < 1e-9
        if np.any(tiny):
            raise SingularStepError(
                "derivative of the square-root form is singular where the "
                "radicand vanishes",
                abscissae=x[tiny][:8].tolist(),
            )
        return self.sign * 0.5 * (dv0 + dv1) / root

    def _zeta_values(self, x: np.ndarray, order: int) -> np.ndarray:
        sys = self.sys
        inv = sys.inv
        if abs(self.delta.imag) > 0.0:
            _check_gap_pole_clearance(x, self.delta, sys)
        if order == 0:
            vals = _zeta_alpha_complex(x, self.delta, sys, self.constant)
            return _project_real(vals, "superpotential")
        xh = x + 1j * inv.tau
        vals = wp(xh + self.delta, inv) - wp(xh, inv)
        return _project_real(vals, "superpotential derivative")

    def _general_values(self, x: np.ndarray, order: int) -> np.ndarray:
        alpha, alpha_prime = _general_alpha_arrays(
            x, self.delta, self.gamma, self.sys, self.constant
        )
        return alpha if order == 0 else alpha_prime


def _as_float_array(x):
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        return arr.reshape(1), True
    return arr, False


# ---------------------------------------------------------------------------
# Constructors (also usable point-wise per the operation signatures)
# ---------------------------------------------------------------------------


def make_sqrt_superpotential(sys: LameSystem, delta: float, sign: int = 1) -> Superpotential:
    eps = factorization_energy(delta, sys)
    return Superpotential(
        delta=complex(delta), epsilon=eps, sys=sys, form=FORM_SQRT, sign=sign
    )


def make_zeta_superpotential(sys: LameSystem, delta) -> Superpotential:
    delta = complex(delta)
    eps = factorization_energy(delta, sys)
    constant = _zeta_constant(delta, sys)
    return Superpotential(
        delta=delta, epsilon=eps, sys=sys, form=FORM_ZETA, constant=constant
    )


def make_general_superpotential(sys: LameSystem, delta, gamma: float) -> Superpotential:
    delta = complex(delta)
    eps = factorization_energy(delta, sys)
    constant = _zeta_constant(delta, sys)
    return Superpotential(
        delta=delta,
        epsilon=eps,
        sys=sys,
        form=FORM_GENERAL,
        gamma=float(gamma),
        constant=constant,
    )


def superpotential_sqrt(x, delta: float, sys: LameSystem, sign: int = 1):
    """Signed square-root form alpha(x) = sign*sqrt(V(x)+V(x+delta)-2 eps)."""
    return make_sqrt_superpotential(sys, delta, sign).alpha(x)


def superpotential_zeta(x, delta, sys: LameSystem):
    """Quasi-periodic closed form alpha(x) = zeta(x^)-zeta(x^+delta)+zeta(delta)."""
    return make_zeta_superpotential(sys, delta).alpha(x)


def general_riccati_solution(x, delta: float, gamma: float, sys: LameSystem):
    """General one-parameter Riccati solution for a real displacement."""
    delta = complex(delta)
    if abs(delta.imag) > 0.0:
        raise DomainError(
            "general_riccati_solution takes a real displacement; in-gap "
            "energies are handled by the chain constructions"
        )
    if not 0.0 < delta.real < 2.0 * (sys.inv.omega if math.isfinite(sys.inv.omega) else math.inf):
        raise DomainError(f"displacement {delta.real} outside (0, 2*omega)")
    return make_general_superpotential(sys, delta, gamma).alpha(x)


# ---------------------------------------------------------------------------
# General one-parameter solution (internal arrays, complex delta capable)
# ---------------------------------------------------------------------------


#: Mixture weights beyond this magnitude are replaced by their limit.
_WEIGHT_SATURATION = 1e18


def _mixture_weight(
    x: np.ndarray,
    delta: complex,
    gamma: float,
    sys: LameSystem,
):
    """Real mixture weight of the general solution, normalized to gamma at x=0.

    Returns (weight, saturated) where ``saturated`` marks points at which the
    weight overflows (constituent poles of the auxiliary quotient); there the
    mixture equals the reverse-displacement solution to machine precision.
    The weight of a real mixing parameter is genuinely real for real
    displacements and for in-gap displacements i*tau + kappa alike; a
    non-real weight signals a branch error and is rejected.
    """
    inv = sys.inv
    xh = x + 1j * inv.tau

    mant_m, exp_m = weier_sigma_parts(xh - delta, inv)
    mant_p, exp_p = weier_sigma_parts(xh + delta, inv)
    zd = weier_zeta(delta, inv)
    log_r = exp_m - exp_p + 2.0 * zd * x

    mant0_m, exp0_m = weier_sigma_parts(1j * inv.tau - delta, inv)
    mant0_p, exp0_p = weier_sigma_parts(1j * inv.tau + delta, inv)
    log_r0 = exp0_m - exp0_p

    ratio = (mant_m / mant_p) * (mant0_p / mant0_m)
    with np.errstate(over="ignore", invalid="ignore"):
        tilde = gamma * ratio * np.exp(log_r - log_r0)

    saturated = ~np.isfinite(tilde) | (np.abs(tilde) > _WEIGHT_SATURATION)
    finite = ~saturated
    if np.any(finite):
        vals = tilde[finite]
        drift = np.max(np.abs(vals.imag) / (1.0 + np.abs(vals.real)))
        if drift > 1e-6:
            raise ConsistencyError(
                f"mixture weight has relative imaginary part {drift:.3e}; "
                "branch bookkeeping is inconsistent"
            )
    weight = np.where(saturated, 2.0 * _WEIGHT_SATURATION, tilde.real)
    return weight, saturated


def _general_alpha_arrays(
    x: np.ndarray,
    delta: complex,
    gamma: float,
    sys: LameSystem,
    constant: complex,
    guard: float = 1e-10,
):
    """alpha and alpha' of the mixed solution on a grid, both real.

    The mixture weight is normalized so that it equals gamma at x = 0; a
    real gamma then keeps the whole family real.  Points where the mixture
    denominator vanishes are movable singularities and are reported.  All
    constituents are projected to real before mixing so that rounding noise
    in their imaginary parts is not amplified near movable singularities.
    """
    inv = sys.inv
    xh = x + 1j * inv.tau

    a_plus = _project_real(
        _zeta_alpha_complex(x, delta, sys, constant), "superpotential"
    )
    p0 = wp(xh, inv)
    dp_plus = _project_real(
        wp(xh + delta, inv) - p0, "superpotential derivative"
    )
    if gamma == 0.0:
        return a_plus, dp_plus

    a_minus = _project_real(
        _zeta_alpha_complex(x, -delta, sys, -constant), "superpotential"
    )
    dp_minus = _project_real(
        wp(xh - delta, inv) - p0, "superpotential derivative"
    )

    tilde, saturated = _mixture_weight(x, delta, gamma, sys)
    denom = 1.0 - tilde

    small = np.abs(denom) < guard
    if np.any(small):
        raise SingularStepError(
            "movable singularity: the mixture denominator vanishes on the grid",
            abscissae=x[small][:8].tolist(),
        )

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        alpha = a_minus + (a_plus - a_minus) / denom

        # Analytic derivative, independent of the Riccati identity itself:
        # the weight's log-derivative is the difference of the two pure forms.
        dlog = a_plus - a_minus
        tilde_prime = tilde * dlog
        alpha_prime = dp_minus + (
            (dp_plus - dp_minus) * denom + (a_plus - a_minus) * tilde_prime
        ) / (denom * denom)

    alpha = np.where(saturated, a_minus, alpha)
    alpha_prime = np.where(saturated, dp_minus, alpha_prime)
    return alpha, alpha_prime


def movable_singularities(
    sys: LameSystem,
    delta,
    gamma: float,
    x0: float,
    x1: float,
    n: int = 4001,
) -> np.ndarray:
    """Locate the movable singularities of the general solution in [x0, x1].

    These are the zeros of 1 - weight(x); grids for residual sweeps must
    keep clear of them (and of the constituent poles for in-gap
    displacements, where the weight itself diverges)."""
    if gamma == 0.0:
        return np.empty(0)
    delta = complex(delta)
    xs = np.linspace(x0, x1, n)
    weight, saturated = _mixture_weight(xs, delta, gamma, sys)
    denom = np.where(saturated, np.inf, 1.0 - weight)
    roots = []
    sign = np.sign(denom)
    flips = np.flatnonzero(sign[1:] * sign[:-1] < 0)
    for i in flips:
        lo, hi = xs[i], xs[i + 1]
        flo = denom[i]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            wmid, smid = _mixture_weight(np.array([mid]), delta, gamma, sys)
            fmid = math.inf if smid[0] else 1.0 - wmid[0]
            if fmid == 0.0:
                lo = hi = mid
                break
            if (fmid > 0) == (flo > 0):
                lo = mid
                flo = fmid
            else:
                hi = mid
            if hi - lo < 1e-13 * max(1.0, abs(hi)):
                break
        root = 0.5 * (lo + hi)
        wr, sr = _mixture_weight(np.array([root]), delta, gamma, sys)
        # Discard sign flips across constituent poles (weight diverges there).
        if not sr[0] and abs(1.0 - wr[0]) < 1e-3:
            roots.append(root)
    return np.asarray(roots)


# ---------------------------------------------------------------------------
# Transformed potentials
# ---------------------------------------------------------------------------


def displaced_potential(
    source,
    alpha: Superpotential,
    grid=None,
    residual_tol: float = 1e-7,
) -> SampledPotential:
    """Partner potential V + alpha' on a uniform grid.

    ``source`` is either the base system (sampled on ``grid`` or a default
    three-period window) or an existing SampledPotential whose grid is
    reused.  The superpotential's own Riccati residual is checked against
    ``residual_tol`` before the partner is formed.
    """
    sys = alpha.sys
    if isinstance(source, SampledPotential):
        base = source
    else:
        if grid is None:
            if math.isfinite(sys.period):
                span = 3.0 * sys.period
                x0 = -0.5 * span
            else:
                span = 16.0 + 2.0 * abs(alpha.delta.real)
                x0 = -0.5 * span
            n = 1201
            grid = (x0, span / (n - 1), n)
        x0, dx, n = grid
        base = sample_lame_potential(sys, x0, dx, int(n))

    x = base.x
    a_vals = alpha.alpha(x)
    a_prime = alpha.alpha_prime(x)
    if not (np.all(np.isfinite(a_vals)) and np.all(np.isfinite(a_prime))):
        bad = x[~(np.isfinite(a_vals) & np.isfinite(a_prime))]
        raise SingularStepError(
            "superpotential is singular on the grid", abscissae=bad[:8].tolist()
        )
    res = riccati_residual(a_vals, a_prime, base.values, alpha.epsilon, "forward")
    if res > residual_tol:
        raise ConsistencyError(
            f"superpotential fails its Riccati equation by {res:.3e} "
            f"(> {residual_tol:g}); refusing to build a partner from it"
        )
    tilted = base.values + a_prime
    # The square-root and quasi-periodic forms produce periodic alpha', so
    # the partner keeps the base period; a nonzero mixing parameter breaks
    # periodicity (localized defect on a periodic background).
    periodic = alpha.form in (FORM_SQRT, FORM_ZETA) or (
        alpha.form == FORM_GENERAL and alpha.gamma == 0.0
    )
    if periodic:
        period = base.period
        background = None
    else:
        period = None
        background = base.period
    return SampledPotential(
        x0=base.x0,
        dx=base.dx,
        values=tilted,
        period=period,
        label=f"partner of [{base.label}]",
        background_period=background,
    )


# ---------------------------------------------------------------------------
# Residual verifiers
# ---------------------------------------------------------------------------


def riccati_residual(alpha, alpha_prime, potential, epsilon: float, direction: str = "forward") -> float:
    """max |-/+ alpha' + alpha^2 - 2 (V - epsilon)| over the grid.

    ``direction`` "forward" checks the base-potential equation (pass V);
    "backward" checks the displaced-potential equation (pass V(.+delta))."""
    a = np.asarray(alpha, dtype=np.float64)
    ap = np.asarray(alpha_prime, dtype=np.float64)
    v = potential.values if isinstance(potential, SampledPotential) else np.asarray(potential, dtype=np.float64)
    if not (a.shape == ap.shape == v.shape):
        raise DomainError(
            f"grid mismatch: alpha {a.shape}, alpha' {ap.shape}, V {v.shape}"
        )
    if direction == "forward":
        res = -ap + a * a - 2.0 * (v - epsilon)
    elif direction == "backward":
        res = ap + a * a - 2.0 * (v - epsilon)
    else:
        raise DomainError(f"direction must be 'forward' or 'backward', got {direction!r}")
    return float(np.max(np.abs(res)))


def displacement_residual_for(
    potential,
    potential_prime,
    delta: float,
    x: np.ndarray,
    guard: float = DENOM_GUARD,
):
    """Spread and recovered energy of the displacement criterion for any V.

    Evaluates  V(x) + V(x+delta) - [ (V'(x)+V'(x+delta)) / (2(V(x)-V(x+delta))) ]^2
    on the grid; a potential admitting the displacement makes this constant
    (equal to twice the factorization energy).  Points where the denominator
    V(x) - V(x+delta) sits inside the relative guard band are excluded.
    """
    x = np.asarray(x, dtype=np.float64)
    v0 = potential(x)
    v1 = potential(x + delta)
    dv0 = potential_prime(x)
    dv1 = potential_prime(x + delta)
    den = v0 - v1
    scale = np.maximum(np.maximum(np.abs(v0), np.abs(v1)), 1.0)
    keep = np.abs(den) > guard * scale
    if not np.any(keep):
        raise DomainError(
            "every grid point sits in the guard band of the displacement "
            "criterion denominator; the grid is degenerate for this delta"
        )
    lhs = v0[keep] + v1[keep] - 0.25 * ((dv0[keep] + dv1[keep]) / den[keep]) ** 2
    spread = float(lhs.max() - lhs.min())
    eps_recovered = float(np.mean(lhs) / 2.0)
    return spread, eps_recovered


def displacement_residual(sys: LameSystem, delta: float, grid=None, guard: float = DENOM_GUARD):
    """Displacement-criterion spread and recovered energy for the periodic family."""
    if grid is None:
        if math.isfinite(sys.period):
            x = np.linspace(-1.5 * sys.period, 1.5 * sys.period, 801)
        else:
            x = np.linspace(-8.0 - abs(delta), 8.0, 801)
    else:
        x = np.asarray(grid, dtype=np.float64)
    return displacement_residual_for(
        lambda t: lame_potential(t, sys),
        lambda t: lame_potential_prime(t, sys),
        delta,
        x,
        guard=guard,
    )


# ---------------------------------------------------------------------------
# Intertwining check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """A smooth localized function with analytic derivatives up to third order."""

    label: str
    center: float
    width: float
    wavenumber: float = 0.0

    def derivatives(self, x: np.ndarray):
        """(f, f', f'', f''') of Re[exp(-( (x-c)/w )^2 + i k (x-c))]."""
        u = x - self.center
        q1 = -2.0 * u / self.width**2 + 1j * self.wavenumber
        q2 = -2.0 / self.width**2
        g = np.exp(-((u / self.width) ** 2) + 1j * self.wavenumber * u)
        f0 = g
        f1 = q1 * g
        f2 = (q2 + q1 * q1) * g
        f3 = (3.0 * q2 * q1 + q1**3) * g
        return f0.real, f1.real, f2.real, f3.real


def default_test_functions(sys: LameSystem):
    w = sys.inv.omega if math.isfinite(sys.inv.omega) else 2.0
    return [
        TestFunction("gaussian-centered", center=0.0, width=w),
        TestFunction("gaussian-offset", center=0.4 * w, width=0.7 * w),
        TestFunction("windowed-wave", center=0.0, width=1.2 * w, wavenumber=2.0),
    ]


def intertwining_residual(
    alpha: Superpotential,
    sys: LameSystem,
    testfns=None,
    grid=None,
    alpha_offset: float = 0.0,
) -> float:
    """max |(A H f)(x) - (H_shift A f)(x)| over test functions and the grid.

    A = (d/dx + alpha)/sqrt(2); H and H_shift carry the base and displaced
    potentials.  ``alpha_offset`` perturbs alpha to measure the detector's
    sensitivity.  All derivatives are analytic except alpha'' for forms
    without one (five-point stencil)."""
    if testfns is None:
        testfns = default_test_functions(sys)
    if grid is None:
        if math.isfinite(sys.period):
            x = np.linspace(-1.5 * sys.period, 1.5 * sys.period, 1201)
        else:
            x = np.linspace(-10.0, 10.0, 1201)
    else:
        x = np.asarray(grid, dtype=np.float64)

    delta = alpha.delta
    inv = sys.inv
    v = lame_potential(x, sys)
    vp = lame_potential_prime(x, sys)
    if abs(delta.imag) == 0.0:
        v_shift = lame_potential(x + delta.real, sys)
    else:
        v_shift = _project_real(wp(x + 1j * inv.tau + delta, inv), "shifted potential")

    a = alpha.alpha(x) + alpha_offset
    a1 = alpha.alpha_prime(x)
    a2 = alpha.alpha_second(x)

    worst = 0.0
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for fn in testfns:
        f0, f1, f2, f3 = fn.derivatives(x)
        hf = -0.5 * f2 + v * f0
        hf_prime = -0.5 * f3 + vp * f0 + v * f1
        lhs = inv_sqrt2 * (hf_prime + a * hf)
        af = inv_sqrt2 * (f1 + a * f0)
        af2 = inv_sqrt2 * (f3 + a2 * f0 + 2.0 * a1 * f1 + a * f2)
        rhs = -0.5 * af2 + v_shift * af
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
