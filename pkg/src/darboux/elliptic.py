"""Weierstrass-class elliptic functions and the periodic potential family built on them.

This module evaluates the Weierstrass functions p(z), p'(z), zeta(z), sigma(z)
for real invariants whose cubic 4t^3 - g2 t - g3 has all-real roots, together
with the Jacobi elliptic sine computed by a descending arithmetic-geometric
mean, the derived lattice data (half-periods, quasi-period constants), and
residual checkers for the defining first-order differential equation and the
two addition laws (singular and regular branches).

Evaluation strategy: the argument is reduced to the lattice cell centred on
the nearest lattice point, halved until it lies inside a fixed fraction of
the cell, evaluated by Laurent/Taylor series there, and then pushed back out
with duplication formulas; quasi-period constants restore zeta and sigma.
The two degenerate lattices (a double root above or below the simple root)
are handled by hyperbolic and trigonometric closed forms instead of limits.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    ConsistencyError,
    DegeneratePairError,
    DomainError,
    PoleProximityError,
)

__all__ = [
    "R_POLE",
    "ComplexPoint",
    "EllipticInvariants",
    "LameSystem",
    "PortraitReport",
    "addition_residual",
    "classify_phase_portrait",
    "complete_elliptic_k",
    "eta_pair",
    "invariants_from_cubic",
    "invariants_from_modulus",
    "jacobi_sn",
    "lame_potential",
    "lame_potential_prime",
    "lame_system",
    "lattice_distance",
    "reduce_to_cell",
    "weier_sigma",
    "weier_sigma_parts",
    "weier_zeta",
    "weierstrass_ode_residual",
    "wp",
    "wp_prime",
]

#: Default pole-exclusion radius: pole-bearing functions refuse evaluation
#: closer than this to a lattice point instead of returning huge values.
R_POLE = 1e-6

# Fraction of the shortest lattice vector used as the series radius.
_SERIES_FRACTION = 0.35
# Number of Laurent coefficients c_k (k = 2..K) kept in the series.
_SERIES_TERMS = 28
# Relative tolerance for detecting coincident cubic roots.
_TIE_TOL = 1e-9


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComplexPoint:
    """A complex argument given by its real/imaginary coordinates."""

    re: float
    im: float = 0.0

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


def _as_complex_array(z):
    """Coerce scalars, ComplexPoint, or array-likes to a complex ndarray.

    Returns (array, was_scalar).
    """
    if isinstance(z, ComplexPoint):
        return np.asarray([z.to_complex()], dtype=np.complex128), True
    arr = np.asarray(z, dtype=np.complex128)
    if arr.ndim == 0:
        return arr.reshape(1), True
    return arr, False


def _unpack(values, scalar):
    if scalar:
        return complex(values[0])
    return values


# ---------------------------------------------------------------------------
# Invariant data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EllipticInvariants:
    """Lattice data for one Weierstrass system with all-real cubic roots.

    ``omega`` is the real half-period; ``tau`` is real with ``i*tau`` the
    imaginary half-period.  ``kind`` is one of ``"generic"`` (three distinct
    roots), ``"solitonic"`` (e1 == e2, omega infinite), or
    ``"trigonometric"`` (e2 == e3, tau infinite).  ``modulus`` records the
    defining modulus when the system was built from one.
    """

    g2: float
    g3: float
    e1: float
    e2: float
    e3: float
    omega: float
    tau: float
    kind: str = "generic"
    modulus: float | None = None

    def __post_init__(self):
        if not (self.e3 <= self.e2 + 1e-12 and self.e2 <= self.e1 + 1e-12):
            raise ConsistencyError(
                f"roots must be ordered e3 <= e2 <= e1, got "
                f"({self.e1}, {self.e2}, {self.e3})"
            )
        if abs(self.e1 + self.e2 + self.e3) > 1e-12:
            raise ConsistencyError(
                f"root sum {self.e1 + self.e2 + self.e3} exceeds 1e-12"
            )
        for root in (self.e1, self.e2, self.e3):
            res = abs(4.0 * root**3 - self.g2 * root - self.g3)
            if res > 1e-10:
                raise ConsistencyError(
                    f"root {root} fails the cubic by {res:.3e} (> 1e-10)"
                )
        if self.kind not in ("generic", "solitonic", "trigonometric"):
            raise ConsistencyError(f"unknown lattice kind {self.kind!r}")


@dataclass(frozen=True)
class LameSystem:
    """Modulus, lattice data, and band-edge energies of the periodic potential

    V(x) = m*sn^2(x|m) - (m+1)/3, whose period is 2*omega.
    """

    m: float
    inv: EllipticInvariants
    E0: float
    E1: float
    E1p: float

    def __post_init__(self):
        if not (self.E0 <= self.E1 + 1e-12 and self.E1 <= self.E1p + 1e-12):
            raise ConsistencyError("band edges must satisfy E0 <= E1 <= E1p")

    @property
    def period(self) -> float:
        return 2.0 * self.inv.omega


@dataclass(frozen=True)
class PortraitReport:
    """Classification of the real solution families of (f')^2 = 4f^3-g2 f-g3.

    ``regular_interval`` is the bounded-oscillation range [e3, e2];
    ``singular_interval`` is [e1, +inf).  ``infinite_period`` flags e1 == e2
    (the oscillation period diverges, the bounded branch becomes a single
    well); ``constant_regular`` flags e2 == e3 (the bounded branch collapses
    to a constant).
    """

    regular_interval: tuple
    singular_interval: tuple
    infinite_period: bool
    constant_regular: bool
    invariants: EllipticInvariants


def complete_elliptic_k(m: float) -> float:
    """Complete elliptic integral K(m) (parameter convention) by AGM iteration.

    K(m) = pi / (2 * AGM(1, sqrt(1-m))).  K(1) is +infinity.
    """
    if not 0.0 <= m <= 1.0:
        raise DomainError(f"modulus parameter m={m} outside [0, 1]")
    if m == 1.0:
        return math.inf
    a, b = 1.0, math.sqrt(1.0 - m)
    for _ in range(60):
        if a - b <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)


def invariants_from_modulus(m: float) -> EllipticInvariants:
    """Lattice data of the modulus-m system by the closed root formulas."""
    if not 0.0 <= m <= 1.0:
        raise DomainError(f"modulus parameter m={m} outside [0, 1]")
    g2 = 4.0 * (m * m - m + 1.0) / 3.0
    g3 = 4.0 * (m - 2.0) * (2.0 * m - 1.0) * (m + 1.0) / 27.0
    e1 = (2.0 - m) / 3.0
    e2 = (2.0 * m - 1.0) / 3.0
    e3 = -(m + 1.0) / 3.0
    if m == 1.0:
        # Double root above: real period infinite (single-well limit).
        return EllipticInvariants(
            g2, g3, e1, e2, e3, math.inf, math.pi / 2.0, "solitonic", m
        )
    if m == 0.0:
        # Double root below: imaginary period infinite (constant bounded branch).
        return EllipticInvariants(
            g2, g3, e1, e2, e3, math.pi / 2.0, math.inf, "trigonometric", m
        )
    omega = complete_elliptic_k(m)
    tau = complete_elliptic_k(1.0 - m)
    return EllipticInvariants(g2, g3, e1, e2, e3, omega, tau, "generic", m)


def invariants_from_cubic(g2: float, g3: float) -> EllipticInvariants:
    """Lattice data from the invariants, requiring all-real cubic roots."""
    scale = max(1.0, abs(g2) ** 1.5, abs(g3))
    disc = g2**3 - 27.0 * g3**2
    if disc < -1e-9 * scale**2:
        raise DomainError(
            f"g2^3 - 27*g3^2 = {disc:.6e} < 0: complex roots are unsupported"
        )
    roots = np.roots([4.0, 0.0, -g2, -g3])
    roots = np.sort(roots.real)[::-1]
    # Newton-polish each root on the exact cubic.
    polished = []
    for r in roots:
        for _ in range(3):
            f = 4.0 * r**3 - g2 * r - g3
            df = 12.0 * r**2 - g2
            if df != 0.0:
                r = r - f / df
        polished.append(float(r))
    e1, e2, e3 = polished
    root_scale = max(1.0, abs(e1), abs(e3))
    tie_top = (e1 - e2) <= _TIE_TOL * root_scale
    tie_bottom = (e2 - e3) <= _TIE_TOL * root_scale
    if tie_top and tie_bottom:
        raise DomainError(
            "fully degenerate cubic (g2 = g3 = 0): both periods are infinite"
        )
    if tie_top:
        a = 0.5 * (e1 + e2)
        e1 = e2 = a
        e3 = -2.0 * a
        tau = math.pi / (2.0 * math.sqrt(3.0 * a))
        return EllipticInvariants(g2, g3, e1, e2, e3, math.inf, tau, "solitonic")
    if tie_bottom:
        b = 0.5 * (e2 + e3)
        e2 = e3 = b
        e1 = -2.0 * b
        omega = math.pi / (2.0 * math.sqrt(-3.0 * b))
        return EllipticInvariants(
            g2, g3, e1, e2, e3, omega, math.inf, "trigonometric"
        )
    s = e1 - e3
    mm = (e2 - e3) / s
    omega = complete_elliptic_k(mm) / math.sqrt(s)
    tau = complete_elliptic_k(1.0 - mm) / math.sqrt(s)
    return EllipticInvariants(g2, g3, e1, e2, e3, omega, tau, "generic")


def lame_system(m: float) -> LameSystem:
    """The modulus-m periodic system with its band-edge energies."""
    inv = invariants_from_modulus(m)
    return LameSystem(
        m=m,
        inv=inv,
        E0=(m - 2.0) / 6.0,
        E1=(1.0 - 2.0 * m) / 6.0,
        E1p=(m + 1.0) / 6.0,
    )


def classify_phase_portrait(g2: float, g3: float) -> PortraitReport:
    """Permitted real-motion intervals of (f')^2 = 4f^3 - g2 f - g3."""
    inv = invariants_from_cubic(g2, g3)
    root_scale = max(1.0, abs(inv.e1), abs(inv.e3))
    return PortraitReport(
        regular_interval=(inv.e3, inv.e2),
        singular_interval=(inv.e1, math.inf),
        infinite_period=(inv.e1 - inv.e2) <= _TIE_TOL * root_scale,
        constant_regular=(inv.e2 - inv.e3) <= _TIE_TOL * root_scale,
        invariants=inv,
    )


# ---------------------------------------------------------------------------
# Series machinery (generic lattices)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _laurent_coeffs(g2: float, g3: float):
    """Coefficients c_k (k = 2.._SERIES_TERMS) of p(z) = 1/z^2 + sum c_k z^(2k-2)."""
    c = {2: g2 / 20.0, 3: g3 / 28.0}
    for k in range(4, _SERIES_TERMS + 1):
        acc = 0.0
        for j in range(2, k - 1):
            acc += c[j] * c[k - j]
        c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3))
    return tuple(c[k] for k in range(2, _SERIES_TERMS + 1))


@lru_cache(maxsize=64)
def _lattice_data(inv: EllipticInvariants):
    """Series coefficients, radii, and quasi-period constants for one lattice."""
    coeffs = _laurent_coeffs(inv.g2, inv.g3)
    w_min = 2.0 * min(inv.omega, inv.tau)
    r0 = _SERIES_FRACTION * w_min
    # eta = zeta(omega), computed by series + duplication only (no
    # translation constants are needed inside the fundamental cell).
    eta = _core_eval(np.asarray([complex(inv.omega, 0.0)]), inv.g2, coeffs, r0)[
        2
    ][0].real
    # Legendre relation for the rectangular lattice orientation used here:
    # i*tau*eta - omega*eta' = i*pi/2, with eta' purely imaginary.
    eta_prime = 1j * (inv.tau * eta - math.pi / 2.0) / inv.omega
    return coeffs, w_min, r0, eta, eta_prime


def _core_eval(z, g2, coeffs, r0):
    """Evaluate (p, p', zeta, sigma) at points already reduced to the cell.

    ``z`` must be a complex ndarray with every entry within the centred cell;
    entries may be arbitrarily close to the origin (the series is a Laurent
    expansion there), in which case only sigma is meaningful downstream.
    """
    absz = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        halvings = np.ceil(np.log2(np.maximum(absz / r0, 1e-300))).astype(int)
    halvings = np.maximum(halvings, 0)
    zs = z * np.power(0.5, halvings)

    w = zs * zs
    # Horner sums over the tail coefficients, highest order first.
    s_p = np.zeros_like(zs)
    s_pp = np.zeros_like(zs)
    s_zt = np.zeros_like(zs)
    s_sg = np.zeros_like(zs)
    for k in range(_SERIES_TERMS, 1, -1):
        ck = coeffs[k - 2]
        s_p = s_p * w + ck
        s_pp = s_pp * w + (2 * k - 2) * ck
        s_zt = s_zt * w + ck / (2 * k - 1)
        s_sg = s_sg * w + ck / (2 * k * (2 * k - 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        p = 1.0 / w + w * s_p
        pp = -2.0 / (w * zs) + zs * s_pp
        zt = (1.0 - w * w * s_zt) / zs
        sg = zs * np.exp(-w * w * s_sg)

    kmax = int(halvings.max()) if halvings.size else 0
    for step in range(1, kmax + 1):
        sel = halvings >= step
        ps, pps, zts, sgs = p[sel], pp[sel], zt[sel], sg[sel]
        ppp = 6.0 * ps * ps - 0.5 * g2
        d = ppp / (2.0 * pps)
        p_new = d * d - 2.0 * ps
        pp_new = 6.0 * ps * d - 2.0 * d**3 - pps
        zt_new = 2.0 * zts + d
        sg_new = -(sgs**4) * pps
        p[sel], pp[sel], zt[sel], sg[sel] = p_new, pp_new, zt_new, sg_new
    return p, pp, zt, sg


def _eval_generic(z, inv):
    """Full evaluation on a generic lattice.

    Returns (p, p', zeta, sigma_mantissa, sigma_exponent, pole_distance), with
    sigma = sigma_mantissa * exp(sigma_exponent).
    """
    coeffs, _w_min, r0, eta, eta_prime = _lattice_data(inv)
    tw = 2.0 * inv.omega
    th = 2.0 * inv.tau
    a = np.round(z.real / tw)
    b = np.round(z.imag / th)
    z0 = z - (a * tw + 1j * b * th)
    dist = np.abs(z0)

    p, pp, zt, sg = _core_eval(z0, inv.g2, coeffs, r0)

    shift = 2.0 * a * eta + 2.0 * b * eta_prime
    zt = zt + shift
    sg_exp = shift * (z0 + a * inv.omega + 1j * b * inv.tau)
    parity = (a.astype(np.int64) + b.astype(np.int64) + a.astype(np.int64) * b.astype(np.int64)) & 1
    sg = np.where(parity == 0, sg, -sg)
    return p, pp, zt, sg, sg_exp, dist


def _eval_solitonic(z, inv):
    """Closed hyperbolic forms for the double-root-above lattice (e1 == e2)."""
    a_root = inv.e1
    s = math.sqrt(3.0 * a_root)
    u = s * z
    b = np.round(z.imag / (2.0 * inv.tau))
    dist = np.abs(z - 2j * inv.tau * b)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        sh = np.sinh(u)
        ch = np.cosh(u)
        p = a_root + 3.0 * a_root / (sh * sh)
        pp = -2.0 * s**3 * ch / sh**3
        zt = -a_root * z + s * ch / sh
        sg = sh / s
    sg_exp = -0.5 * a_root * z * z
    return p, pp, zt, sg, sg_exp, dist


def _eval_trigonometric(z, inv):
    """Closed trigonometric forms for the double-root-below lattice (e2 == e3)."""
    b_root = inv.e2
    s = math.sqrt(-3.0 * b_root)
    u = s * z
    a = np.round(z.real / (2.0 * inv.omega))
    dist = np.abs(z - 2.0 * inv.omega * a)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        sn = np.sin(u)
        cs = np.cos(u)
        p = b_root + s * s / (sn * sn)
        pp = -2.0 * s**3 * cs / sn**3
        zt = -b_root * z + s * cs / sn
        sg = sn / s
    sg_exp = -0.5 * b_root * z * z
    return p, pp, zt, sg, sg_exp, dist


def _eval_all(z, inv):
    if inv.kind == "generic":
        return _eval_generic(z, inv)
    if inv.kind == "solitonic":
        return _eval_solitonic(z, inv)
    return _eval_trigonometric(z, inv)


def _guard_poles(z, dist, r_pole):
    worst = int(np.argmin(dist))
    if dist[worst] < r_pole:
        raise PoleProximityError(complex(z.flat[worst]), float(dist[worst]), r_pole)


# ---------------------------------------------------------------------------
# Public evaluators
# ---------------------------------------------------------------------------


def wp(z, inv: EllipticInvariants, r_pole: float = R_POLE):
    """Weierstrass p-function; accepts scalars, ComplexPoint, or arrays."""
    arr, scalar = _as_complex_array(z)
    p, _pp, _zt, _sg, _se, dist = _eval_all(arr, inv)
    _guard_poles(arr, dist, r_pole)
    return _unpack(p, scalar)


def wp_prime(z, inv: EllipticInvariants, r_pole: float = R_POLE):
    """Derivative of the Weierstrass p-function."""
    arr, scalar = _as_complex_array(z)
    _p, pp, _zt, _sg, _se, dist = _eval_all(arr, inv)
    _guard_poles(arr, dist, r_pole)
    return _unpack(pp, scalar)


def weier_zeta(z, inv: EllipticInvariants, r_pole: float = R_POLE):
    """Weierstrass zeta function (quasi-periodic antiderivative of -p)."""
    arr, scalar = _as_complex_array(z)
    _p, _pp, zt, _sg, _se, dist = _eval_all(arr, inv)
    _guard_poles(arr, dist, r_pole)
    return _unpack(zt, scalar)


def weier_sigma_parts(z, inv: EllipticInvariants):
    """Weierstrass sigma as (mantissa, exponent) with sigma = mantissa*exp(exponent).

    The split keeps quotients of sigma values finite when the raw values
    would overflow; sigma is entire, so there is no pole exclusion.
    """
    arr, scalar = _as_complex_array(z)
    _p, _pp, _zt, sg, sg_exp, _dist = _eval_all(arr, inv)
    if scalar:
        return complex(sg[0]), complex(sg_exp[0])
    return sg, sg_exp


def weier_sigma(z, inv: EllipticInvariants):
    """Weierstrass sigma function (entire; may overflow far from the origin)."""
    mant, expo = weier_sigma_parts(z, inv)
    return mant * np.exp(expo) if not np.isscalar(mant) else mant * cmath.exp(expo)


def eta_pair(inv: EllipticInvariants):
    """Quasi-period constants (zeta at the half-periods omega and i*tau)."""
    if inv.kind == "generic":
        _c, _w, _r, eta, eta_prime = _lattice_data(inv)
        return eta, eta_prime
    if inv.kind == "trigonometric":
        # zeta(omega) = -e2*omega; the imaginary half-period is infinite.
        return -inv.e2 * inv.omega, complex(math.inf, math.inf)
    # Solitonic: the real half-period is infinite; zeta(i*tau) = -i*e1*tau.
    return math.inf, -1j * inv.e1 * inv.tau


def lattice_distance(z, inv: EllipticInvariants):
    """Distance from z to the nearest lattice point (pole of p)."""
    arr, scalar = _as_complex_array(z)
    _p, _pp, _zt, _sg, _se, dist = _eval_all(arr, inv)
    if scalar:
        return float(dist[0])
    return dist


def reduce_to_cell(z, inv: EllipticInvariants) -> ComplexPoint:
    """Representative of z in the fundamental cell [0, 2*omega) x [0, 2*tau)."""
    zc = z.to_complex() if isinstance(z, ComplexPoint) else complex(z)
    tw, th = 2.0 * inv.omega, 2.0 * inv.tau
    re = zc.real - tw * math.floor(zc.real / tw) if math.isfinite(tw) else zc.real
    im = zc.imag - th * math.floor(zc.imag / th) if math.isfinite(th) else zc.imag
    return ComplexPoint(re, im)


# ---------------------------------------------------------------------------
# Jacobi elliptic sine (descending Landen / AGM)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _agm_chain(m: float):
    """AGM sequences (a_n, c_n) descending from (1, sqrt(1-m), sqrt(m))."""
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    chain = []
    for _ in range(40):
        if c <= 1e-16 * a:
            break
        chain.append((a, c))
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
    chain.append((a, c))
    return tuple(chain)


def jacobi_sn(x, m: float):
    """Jacobi elliptic sine sn(x|m), parameter convention, for real x."""
    if not 0.0 <= m <= 1.0:
        raise DomainError(f"modulus parameter m={m} outside [0, 1]")
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if m == 0.0:
        out = np.sin(arr)
        return float(out[0]) if scalar else out
    if m == 1.0:
        out = np.tanh(arr)
        return float(out[0]) if scalar else out
    quarter = complete_elliptic_k(m)
    u = np.mod(arr, 4.0 * quarter)
    sign = np.ones_like(u)
    high = u >= 2.0 * quarter
    u = np.where(high, u - 2.0 * quarter, u)
    sign = np.where(high, -sign, sign)
    fold = u > quarter
    u = np.where(fold, 2.0 * quarter - u, u)

    chain = _agm_chain(m)
    n_last = len(chain) - 1
    phi = (2.0**n_last) * chain[n_last][0] * u
    for n in range(n_last, 0, -1):
        a_n, c_n = chain[n]
        ratio = np.clip(c_n / a_n * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(ratio))
    out = sign * np.sin(phi)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# The periodic potential family
# ---------------------------------------------------------------------------


def lame_potential(x, sys: LameSystem):
    """V(x) = m*sn^2(x|m) - (m+1)/3; bounded in [e3, e2] with period 2*omega."""
    sn = jacobi_sn(x, sys.m)
    return sys.m * sn * sn - (sys.m + 1.0) / 3.0


def lame_potential_prime(x, sys: LameSystem):
    """dV/dx, evaluated through the lattice route (real part of p' off-axis)."""
    if sys.m == 0.0:
        arr = np.asarray(x, dtype=np.float64)
        return 0.0 if arr.ndim == 0 else np.zeros_like(arr)
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    vals = wp_prime(arr + 1j * sys.inv.tau, sys.inv).real
    return float(vals[0]) if scalar else vals


# ---------------------------------------------------------------------------
# Residual checkers
# ---------------------------------------------------------------------------


def weierstrass_ode_residual(z, inv: EllipticInvariants, r_pole: float = R_POLE):
    """|p'(z)^2 - (4 p(z)^3 - g2 p(z) - g3)| at z (scalar or array)."""
    arr, scalar = _as_complex_array(z)
    p, pp, _zt, _sg, _se, dist = _eval_all(arr, inv)
    _guard_poles(arr, dist, r_pole)
    res = np.abs(pp * pp - (4.0 * p**3 - inv.g2 * p - inv.g3))
    return float(res[0]) if scalar else res


def addition_residual(
    u: float,
    v: float,
    inv: EllipticInvariants,
    branch: str = "S",
    pair_tol: float = 1e-8,
) -> float:
    """|LHS - RHS| of the two-argument addition law on one branch.

    Branch "S" uses the pole-bearing real solutions f = p(.); branch "R"
    uses the bounded real section f = p(. + i*tau).  In both cases the
    combined-argument term is p(u+v) on the pole-bearing branch.
    """
    if branch not in ("S", "R"):
        raise DomainError(f"branch must be 'S' or 'R', got {branch!r}")
    if inv.kind != "generic" and branch == "R":
        raise DomainError("branch 'R' requires a finite imaginary half-period")
    shift = 1j * inv.tau if branch == "R" else 0.0
    fu = wp(u + shift, inv)
    fv = wp(v + shift, inv)
    dfu = wp_prime(u + shift, inv)
    dfv = wp_prime(v + shift, inv)
    scale = max(1.0, abs(fu), abs(fv))
    if abs(fu - fv) < pair_tol * scale:
        raise DegeneratePairError(
            f"function values at u={u} and v={v} coincide within "
            f"{pair_tol:g} relative; the addition law denominator vanishes"
        )
    lhs = wp(u + v, inv) + fu + fv
    rhs = 0.25 * ((dfu - dfv) / (fu - fv)) ** 2
    return abs(lhs - rhs)
