"""Eigenvalue sums from the continuous WKB level function.

The sum over the lowest ``N`` levels is organised as an Euler-Maclaurin
expansion of ``f(j) = eps0(j)`` around its integral.  Two conventions exist:

``endpoint``
    ``sum_{j=0}^{N-1} f(j) = int_0^{N-1} f + (f(0) + f(N-1))/2
    + sum_k B_2k / (2k)! (f^(2k-1)(N-1) - f^(2k-1)(0))``
``midpoint``
    ``sum_{j=0}^{N-1} f(j) = int_{-1/2}^{N-1/2} f
    + sum_k B_2k(1/2) / (2k)! (f^(2k-1)(N-1/2) - f^(2k-1)(-1/2))``,
    with ``B_2k(1/2) = (2**(1-2k) - 1) B_2k``.

The midpoint integral is the Thomas-Fermi energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import mpmath
import numpy as np
from scipy.integrate import quad

from . import airy
from .errors import NotSupportedError, UnboundLevelError
from .oracle import PrecisionConfig, exact_sum
from .potentials import PotentialSpec, maslov_index
from .wkb import bound_wkb_levels, pt_lambda0, wkb_level, wkb_shift

CONVENTIONS = ("endpoint", "midpoint")
INTEGRAL_RTOL = 1e-12
# eps2(j) carries finite-difference noise near 1e-11, so its integral is looser
SHIFT_INTEGRAL_RTOL = 1e-9
DERIV_STEP = 1e-3
# third derivatives amplify rounding by step**-3; a wider step keeps it tame
DERIV3_STEP = 5e-2
# Bernoulli coefficients B_2k / (2k)! for k = 1, 2
_EM_COEF = {2: 1.0 / 12.0, 4: -1.0 / 720.0}


def _midpoint_factor(order: int) -> float:
    return 2.0 ** (1 - order) - 1.0


@dataclass(frozen=True)
class EnergyBreakdown:
    """An eigenvalue-sum estimate split into its pieces.

    ``total`` is always ``e0 + d2a + d2b + sum(em_higher)`` evaluated left to
    right, so the parts add up to it exactly.  ``level_function`` names the
    function the Euler-Maclaurin pieces were built from (``wkb0`` or ``airy``)
    and ``d2a_mode`` how ``d2a`` was obtained.
    """

    N: int
    convention: str
    e0: float
    d2a: float
    d2b: float
    em_higher: tuple
    total: float = None
    exact: Optional[float] = None
    error: Optional[float] = None
    order: int = 0
    d2a_mode: str = "none"
    level_function: str = "wkb0"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")
        object.__setattr__(self, "em_higher", tuple(float(t) for t in self.em_higher))
        assembled = self.e0 + self.d2a + self.d2b
        for t in self.em_higher:
            assembled += t
        if self.total is None:
            object.__setattr__(self, "total", assembled)
        elif self.total != assembled:
            raise ValueError("total must equal e0 + d2a + d2b + sum(em_higher)")
        if self.exact is not None:
            object.__setattr__(self, "error", self.total - self.exact)

    def with_exact(self, exact: float) -> "EnergyBreakdown":
        return EnergyBreakdown(self.N, self.convention, self.e0, self.d2a, self.d2b,
                               self.em_higher, self.total, float(exact), None, self.order,
                               self.d2a_mode, self.level_function)


@dataclass(frozen=True)
class AsymptoticSeries:
    """Signed, already evaluated terms of an asymptotic expansion."""

    terms: tuple
    label: str = ""

    def __post_init__(self):
        terms = tuple(self.terms)
        if not all(math.isfinite(float(t)) for t in terms):
            raise ValueError("series terms must be finite")
        object.__setattr__(self, "terms", terms)

    def partial_sum(self, m: int):
        """Sum of the first ``m`` terms."""
        out = 0 * self.terms[0]
        for t in self.terms[:m]:
            out += t
        return out


def optimal_truncate(series: AsymptoticSeries):
    """Smallest-term truncation: keep terms up to and including the smallest.

    Returns ``(partial_sum, m)`` where ``m`` terms are summed; the first
    smallest-magnitude term wins ties.
    """
    if len(series.terms) < 2:
        raise ValueError("series needs at least two terms")
    mags = [abs(t) for t in series.terms]
    k = min(range(len(mags)), key=mags.__getitem__)
    return series.partial_sum(k + 1), k + 1


# ---------------------------------------------------------------------------
# level functions and finite differences

def _fornberg(x0: float, nodes: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at x0 (Fornberg 1988)."""
    n = len(nodes)
    c = np.zeros((n, m + 1))
    c1, c4 = 1.0, nodes[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def finite_derivative(f: Callable[[float], float], x: float, m: int,
                      step: float, lower: float = -math.inf) -> float:
    """m-th derivative (m = 1 or 3) by central differences, Richardson-refined once.

    When the stencil would cross ``lower`` a one-sided 7-point rule is used.
    """
    if x - 2 * step > lower:
        offsets = np.array([-2.0, -1.0, 1.0, 2.0]) if m == 3 else np.array([-1.0, 1.0])
        w = _fornberg(0.0, offsets, m)

        def estimate(h):
            return sum(wi * f(x + oi * h) for wi, oi in zip(w, offsets)) / h ** m

        return (4.0 * estimate(0.5 * step) - estimate(step)) / 3.0
    offsets = np.arange(7, dtype=float)
    start = max(x, lower)
    w = _fornberg(x - start, offsets * step, m)
    return float(sum(wi * f(start + oi * step) for wi, oi in zip(w, offsets)))


@dataclass(frozen=True)
class LevelFunction:
    """A level energy as a smooth function of a continuous index.

    ``derivative(j, m)`` is closed form when ``closed_derivative`` is set,
    otherwise finite differences on ``value``.
    """

    value: Callable[[float], float]
    lower: float = -math.inf
    closed_derivative: Optional[Callable[[float, int], float]] = None
    name: str = "wkb0"

    def __call__(self, j):
        return self.value(j)

    def derivative(self, j: float, m: int) -> float:
        if self.closed_derivative is not None:
            return self.closed_derivative(j, m)
        return finite_derivative(self.value, j, m, DERIV_STEP if m == 1 else DERIV3_STEP,
                                 self.lower)


def _poly_derivative(coeffs):
    # coeffs of a polynomial in j (highest power first)
    def d(j, m):
        return float(np.polyval(np.polyder(coeffs, m), j)) if m < len(coeffs) else 0.0
    return d


def wkb0_level_function(spec: PotentialSpec) -> LevelFunction:
    """``eps0(j)`` from continuous quantization; closed-form derivatives where known."""
    nu = float(maslov_index(spec))
    closed = None
    if spec.kind == "box":
        s = math.pi ** 2 / (2.0 * spec.params["L"] ** 2)
        closed = _poly_derivative([s, 2 * s, s])
    elif spec.kind == "harmonic":
        w = spec.params["w"]
        closed = _poly_derivative([w, 0.5 * w])
    elif spec.kind == "poschl_teller":
        lam0 = pt_lambda0(spec.params["D"])
        closed = _poly_derivative([-0.5, lam0, -0.5 * lam0 ** 2])
    return LevelFunction(lambda j: wkb_level(spec, float(j)), -nu, closed, "wkb0")


def _integrate(f: Callable[[float], float], a: float, b: float,
               rtol: float = INTEGRAL_RTOL, atol: float = 0.0) -> float:
    if b == a:
        return 0.0
    val, _ = quad(f, a, b, epsabs=atol, epsrel=rtol, limit=200)
    return val


def _limits(N: int, convention: str):
    if convention == "endpoint":
        return 0.0, N - 1.0
    if convention == "midpoint":
        return -0.5, N - 0.5
    raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


def _check_levels(spec: PotentialSpec, N: int, convention: str):
    if N < 1:
        raise ValueError("N must be >= 1")
    _, hi = _limits(N, convention)
    top = bound_wkb_levels(spec)
    if math.isfinite(top) and hi > pt_lambda0(spec.params["D"]):
        raise UnboundLevelError(f"{spec!r} has no WKB level at j = {hi}")


# ---------------------------------------------------------------------------

def integral_sum(spec: PotentialSpec, N: int, convention: str = "endpoint") -> float:
    """Integral of ``eps0(j)`` over the convention's range of j."""
    _check_levels(spec, N, convention)
    a, b = _limits(N, convention)
    return _integrate(lambda j: wkb_level(spec, j), a, b)


def delta_2a(spec: PotentialSpec, N: int, discrete: bool = False,
             convention: str = "endpoint") -> float:
    """Second-order WKB contribution: ``int eps2(j) dj`` or, if ``discrete``, ``sum eps2(j)``."""
    _check_levels(spec, N, convention)
    if spec.kind == "box":
        return 0.0
    if discrete:
        return math.fsum(wkb_shift(spec, float(j)) for j in range(N))
    a, b = _limits(N, convention)
    # eps2 vanishes identically for the harmonic well, hence the absolute floor
    return _integrate(lambda j: wkb_shift(spec, j), a, b, SHIFT_INTEGRAL_RTOL, 1e-12 * (b - a))


def delta_2b(spec: PotentialSpec, N: int) -> float:
    """Trapezoid correction ``(eps0(N-1) + eps0(0)) / 2`` of the endpoint integral."""
    _check_levels(spec, N, "endpoint")
    return 0.5 * (wkb_level(spec, float(N - 1)) + wkb_level(spec, 0.0))


def bernoulli_terms(f: LevelFunction, a: float, b: float, order: int, convention: str):
    """Euler-Maclaurin derivative terms through ``B_order`` on ``[a, b]``."""
    terms = []
    for k in (2, 4):
        if k > order:
            break
        scale = _EM_COEF[k] * (_midpoint_factor(k) if convention == "midpoint" else 1.0)
        terms.append(scale * (f.derivative(b, k - 1) - f.derivative(a, k - 1)))
    return terms


def euler_maclaurin_sum(values_fn, N: int, order: int = 2,
                        convention: str = "endpoint") -> EnergyBreakdown:
    """Approximate ``sum_{j<N} f(j)`` from the integral of ``f`` plus corrections.

    ``values_fn`` is a :class:`LevelFunction` or any smooth callable.  ``order``
    is the highest Bernoulli number used (0, 2 or 4).
    """
    if order > 4:
        raise NotSupportedError("Euler-Maclaurin terms stop at B4")
    if order not in (0, 2, 4):
        raise ValueError(f"order must be 0, 2 or 4, got {order!r}")
    if N < 1:
        raise ValueError("N must be >= 1")
    f = values_fn if isinstance(values_fn, LevelFunction) else LevelFunction(values_fn)
    a, b = _limits(N, convention)
    e0 = _integrate(f, a, b)
    d2b = 0.5 * (f(a) + f(b)) if convention == "endpoint" else 0.0
    return EnergyBreakdown(N, convention, e0, 0.0, d2b,
                           bernoulli_terms(f, a, b, order, convention),
                           order=order, level_function=f.name)


# ---------------------------------------------------------------------------
# linear half-well: levels from the Airy phase function

def airy_level_function(dps: int = 20) -> LevelFunction:
    """Exact linear half-well levels ``u(j) / 2**(1/3)`` (Hartree) for real ``j > -3/4``."""
    scale = float(airy.hartree_scale(dps))

    def value(j):
        return float(airy.level_position(j, dps)) * scale

    def deriv(j, m):
        coeffs = airy.level_taylor(j, m, dps)
        return float(coeffs[m] * math.factorial(m)) * scale

    return LevelFunction(value, -0.75, deriv, "airy")


def _linwell_breakdown(spec, N, convention, order, dps=20):
    f0 = wkb0_level_function(spec)
    a, b = _limits(N, convention)
    e0 = _integrate(f0, a, b)
    if order == 0:
        d2b = 0.5 * (f0(a) + f0(b)) if convention == "endpoint" else 0.0
        return EnergyBreakdown(N, convention, e0, 0.0, d2b, (), order=0)
    # every correction beyond eps0 comes from the exact level function
    u = airy_level_function(dps)
    with mpmath.workdps(dps):
        integral_u = float(airy.level_integral(a, b, dps) * airy.hartree_scale(dps))
    d2b = 0.5 * (u(a) + u(b)) if convention == "endpoint" else 0.0
    return EnergyBreakdown(N, convention, e0, integral_u - e0, d2b,
                           bernoulli_terms(u, a, b, order, convention), order=order,
                           d2a_mode="airy", level_function="airy")


def breakdown(spec: PotentialSpec, N: int, convention: str = "endpoint", order: int = 2,
              discrete_eps2: bool = False, with_exact: bool = True,
              prec: PrecisionConfig = PrecisionConfig()) -> EnergyBreakdown:
    """Assemble ``E_N`` from its integral, the two leading corrections and B4.

    ``order`` 0 keeps the integral and the trapezoid term; 2 adds the
    second-order WKB shift and the B2 term; 4 adds B4.  For the linear
    half-well (whose wall is outside the smooth-turning-point formula) the
    corrections at order 2 and 4 use the exact Airy level function, with
    ``d2a`` the integral of ``u - eps0``.
    """
    if order not in (0, 2, 4):
        raise ValueError(f"order must be 0, 2 or 4, got {order!r}")
    _check_levels(spec, N, convention)
    if spec.kind == "linear_half_well":
        out = _linwell_breakdown(spec, N, convention, order)
    else:
        f = wkb0_level_function(spec)
        base = euler_maclaurin_sum(f, N, order, convention)
        d2a, mode = 0.0, "none"
        if order >= 2:
            d2a = delta_2a(spec, N, discrete_eps2, convention)
            mode = "discrete" if discrete_eps2 else "integral"
        out = EnergyBreakdown(N, convention, base.e0, d2a, base.d2b, base.em_higher,
                              order=order, d2a_mode=mode)
    if with_exact:
        out = out.with_exact(float(exact_sum(spec, N, prec)))
    return out


def wkb0_sum(spec: PotentialSpec, N: int) -> float:
    """Discrete sum of the zeroth-order WKB levels."""
    _check_levels(spec, N, "endpoint")
    return math.fsum(wkb_level(spec, float(j)) for j in range(N))


def linear_well_series(N: int = 10, head: int = 1, terms: int = 20,
                       dps: int = 30) -> AsymptoticSeries:
    """Euler-Maclaurin series for the linear half-well sum ``E_N`` (Hartree).

    The lowest ``head`` levels are taken from the Airy oracle; the rest is
    ``int_head^{N-1} u + (u(head) + u(N-1))/2 + sum_k B_2k/(2k)! (u^(2k-1)(N-1)
    - u^(2k-1)(head))``.  The level function has a branch point near
    ``j = -1``, so the series is asymptotic with an optimum set by the
    distance of ``head`` from it.  Terms are mpf values; entry 0 is the head
    sum plus the integral, entry 1 the trapezoid term, entry k+1 the B_2k term.
    """
    if not 0 <= head < N - 1:
        raise ValueError("need 0 <= head < N - 1")
    with mpmath.workdps(dps + airy.GUARD_DIGITS):
        scale = airy.hartree_scale(dps + airy.GUARD_DIGITS)
        a, b = mpmath.mpf(head), mpmath.mpf(N - 1)
        head_sum = -mpmath.fsum(airy.airy_zero(j + 1, dps) for j in range(head)) * scale
        ta = airy.level_taylor(a, 2 * terms, dps)
        tb = airy.level_taylor(b, 2 * terms, dps)
        out = [head_sum + airy.level_integral(a, b, dps) * scale,
               (ta[0] + tb[0]) / 2 * scale]
        for k in range(1, terms + 1):
            m = 2 * k - 1
            out.append(mpmath.bernoulli(2 * k) / (2 * k) * (tb[m] - ta[m]) * scale)
    return AsymptoticSeries(tuple(out), f"linear half-well E_{N}, head={head}")
