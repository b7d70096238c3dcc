"""WKB quantization at zeroth and second semiclassical order.

The quantization condition is ``action(eps) = (j + nu) * pi`` with the action
integrated over the classically allowed interval.  The second-order shift is
the first-order perturbative solution of

    action(eps) - (1/24) d/deps J(eps) = (j + nu) * pi,   J(eps) = int v''/p dx,

i.e. ``eps2 = J'(eps0) / (24 * period(eps0))`` with ``period = d action / d eps``.
``J`` itself is finite (v''/p has an integrable inverse-square-root end
behaviour, removed by the sine substitution); its energy derivative is taken
by Richardson-refined central differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import _kernels as K
from .errors import NoAllowedRegionError, NotSupportedError, PrecisionError, UnboundLevelError
from .potentials import AllowedInterval, PotentialSpec, maslov_index, turning_points

QUAD_RTOL = 2e-14
_MIN_NODES, _MAX_NODES = 32, 4096


@dataclass(frozen=True)
class WkbSeries:
    """Per-level WKB eigenvalue expansion: ``eps0 + eps2 + O(hbar**4)``."""

    j: float
    eps0: float
    eps2: float
    nu: Fraction

    @property
    def total(self) -> float:
        return self.eps0 + self.eps2


@lru_cache(maxsize=None)
def _gauss_theta(n: int):
    t, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * math.pi
    nodes, weights = half * t, half * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _theta_integral(spec: PotentialSpec, eps: float, what: int, iv: AllowedInterval) -> float:
    args = (spec.code, spec.param_array, eps, iv.lo, iv.hi,
            iv.lo_kind == "smooth", iv.hi_kind == "smooth")
    nodes, weights = _gauss_theta(_MIN_NODES)
    prev = K.theta_quadrature(*args, nodes, weights, what)
    scale = abs(prev)
    if what == K.CURVATURE:
        # v'' changes sign, so J can be small next to int |v''|/p; bound the latter
        x = 0.5 * (iv.lo + iv.hi) + 0.5 * (iv.hi - iv.lo) * np.sin(nodes)
        vpp = np.max(np.abs(K.potential_derivative(spec.code, spec.param_array, x, 2)))
        scale = max(scale, vpp * K.theta_quadrature(*args, nodes, weights, K.INVERSE_MOMENTUM))
    n = _MIN_NODES
    while n < _MAX_NODES:
        n *= 2
        cur = K.theta_quadrature(*args, *_gauss_theta(n), what)
        if abs(cur - prev) <= QUAD_RTOL * max(abs(cur), scale, 1e-300):
            return cur
        prev = cur
    raise PrecisionError(f"theta quadrature did not converge for {spec!r} at eps={eps}")


def region_integral(spec: PotentialSpec, eps: float, what: int) -> float:
    """Integral of a momentum-based integrand over every allowed interval."""
    tp = turning_points(spec, eps)
    return sum(_theta_integral(spec, eps, what, iv) for iv in tp.intervals)


def action_integral(spec: PotentialSpec, eps: float) -> float:
    """Classical action ``int p(eps, x) dx`` over the allowed region."""
    return region_integral(spec, eps, K.MOMENTUM)


def period_integral(spec: PotentialSpec, eps: float) -> float:
    """``int dx / p``, the energy derivative of the action (half the classical period)."""
    return region_integral(spec, eps, K.INVERSE_MOMENTUM)


def curvature_integral(spec: PotentialSpec, eps: float) -> float:
    """``J(eps) = int v''(x) / p dx`` over the allowed region."""
    return region_integral(spec, eps, K.CURVATURE)


def _action_limit(spec: PotentialSpec) -> float:
    # action at the continuum threshold (finite only for Poschl-Teller)
    if spec.kind == "poschl_teller":
        return math.pi * math.sqrt(2.0 * spec.params["D"])
    return math.inf


def _safe_action(spec: PotentialSpec, eps: float) -> float:
    if eps <= spec.infimum:
        return 0.0
    return action_integral(spec, eps)


def _solve_level(spec: PotentialSpec, target: float) -> float:
    lo = spec.infimum
    if target <= 0.0:
        if target == 0.0:
            return lo
        raise NoAllowedRegionError(f"quantum number below the band bottom of {spec!r}")
    if target >= _action_limit(spec):
        raise UnboundLevelError(f"no bound WKB level with action {target} in {spec!r}")
    if math.isfinite(spec.threshold):
        gap = spec.threshold - lo
        hi = spec.threshold - 0.5 * gap
        while _safe_action(spec, hi) <= target:
            gap *= 0.5
            hi = spec.threshold - 0.5 * gap
            if gap < 1e-300:
                raise UnboundLevelError(f"level too close to the continuum of {spec!r}")
    else:
        width = 1.0
        hi = lo + width
        while _safe_action(spec, hi) <= target:
            lo, width = hi, 2.0 * width
            hi = lo + width
    return brentq(lambda e: _safe_action(spec, e) - target, lo, hi,
                  xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)


@lru_cache(maxsize=65536)
def wkb_level(spec: PotentialSpec, j: float) -> float:
    """Zeroth-order WKB energy for a (possibly non-integer) level index ``j``."""
    nu = maslov_index(spec)
    return _solve_level(spec, (float(j) + float(nu)) * math.pi)


def _energy_step(spec: PotentialSpec, eps: float) -> float:
    room = eps - spec.infimum
    if math.isfinite(spec.threshold):
        room = min(room, spec.threshold - eps)
    return 1e-3 * min(room, max(1.0, abs(eps)))


def curvature_derivative(spec: PotentialSpec, eps: float) -> float:
    """dJ/deps by central differences, Richardson-refined once."""
    h = _energy_step(spec, eps)

    def central(step):
        return (curvature_integral(spec, eps + step)
                - curvature_integral(spec, eps - step)) / (2.0 * step)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def second_order_shift(spec: PotentialSpec, eps0: float) -> float:
    """O(hbar^2) eigenvalue shift at the zeroth-order energy ``eps0``."""
    if spec.kind == "box":
        return 0.0  # v'' = 0 and WKB is exact between hard walls
    if any(kind == "hard_wall" for kind in spec.boundary):
        raise NotSupportedError(
            f"second-order WKB with a hard wall is not supported for {spec!r}")
    return curvature_derivative(spec, eps0) / (24.0 * period_integral(spec, eps0))


@lru_cache(maxsize=65536)
def wkb_shift(spec: PotentialSpec, j: float) -> float:
    """Second-order shift ``eps2`` for a (possibly non-integer) level index."""
    return second_order_shift(spec, wkb_level(spec, j))


def quantize(spec: PotentialSpec, j, order: int = 0) -> WkbSeries:
    """Solve the WKB condition for level ``j`` at order 0 or 2.

    ``j`` may be non-integer; the sum engine integrates over continuous j.
    """
    if order not in (0, 2):
        raise ValueError(f"order must be 0 or 2, got {order!r}")
    nu = maslov_index(spec)
    eps0 = wkb_level(spec, float(j))
    eps2 = wkb_shift(spec, float(j)) if order == 2 else 0.0
    return WkbSeries(j=j, eps0=eps0, eps2=eps2, nu=nu)


def pt_lambda0(D: float) -> float:
    return math.sqrt(2.0 * D) - 0.5


def pt_wkb_closed_form(D: float, j) -> float:
    """Closed-form zeroth-order WKB level of the Poschl-Teller well."""
    lam0 = pt_lambda0(D)
    if j > lam0:
        raise UnboundLevelError(f"level {j} exceeds lambda0 = {lam0} for D = {D}")
    return -0.5 * (lam0 - j) ** 2


def pt_wkb_shift(D: float, j) -> float:
    """Leading-order expansion of the exact-minus-WKB Poschl-Teller level."""
    return -(pt_lambda0(D) - j) / (8.0 * math.sqrt(2.0 * D))


def bound_wkb_levels(spec: PotentialSpec) -> int:
    """Number of integer levels with a zeroth-order WKB solution (inf if confining)."""
    limit = _action_limit(spec)
    if math.isinf(limit):
        return math.inf
    return math.ceil(limit / math.pi - float(maslov_index(spec)))
