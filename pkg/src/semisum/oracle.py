"""Trusted eigenvalues: closed forms, Airy zeros, and a Richardson-extrapolated grid solver."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import airy
from .errors import NoClosedFormError, PrecisionError, UnboundLevelError
from .potentials import PotentialSpec, evaluate, turning_points
from .wkb import wkb_level

logger = logging.getLogger(__name__)

SOURCES = ("closed_form", "airy_zero", "grid_solver")
# digits a double-precision finite-difference solve is asked to certify
GRID_MAX_DIGITS = 9


@dataclass(frozen=True)
class PrecisionConfig:
    target_digits: int = 15
    working_digits: int = None
    max_iterations: int = 60

    def __post_init__(self):
        if self.working_digits is None:
            object.__setattr__(self, "working_digits", self.target_digits + airy.GUARD_DIGITS)
        if self.working_digits < self.target_digits + 8:
            raise ValueError("working_digits must be at least target_digits + 8")
        if self.target_digits < 1 or self.max_iterations < 1:
            raise ValueError("target_digits and max_iterations must be positive")


@dataclass(frozen=True)
class Spectrum:
    """Lowest eigenvalues in increasing order, with their provenance.

    ``errors`` holds per-level absolute error bounds (zero for closed forms).
    """

    eigenvalues: tuple
    source: str
    precision_digits: int
    errors: tuple = field(default=())

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        ev = self.eigenvalues
        if any(b <= a for a, b in zip(ev[:-1], ev[1:])):
            raise ValueError("eigenvalues must be strictly increasing")

    def __len__(self):
        return len(self.eigenvalues)


def pt_lambda(D: float) -> float:
    return math.sqrt(2.0 * D + 0.25) - 0.5


def bound_state_count(spec: PotentialSpec) -> float:
    """Number of bound states; ``inf`` for confining potentials."""
    if spec.kind == "poschl_teller":
        return math.floor(pt_lambda(spec.params["D"])) + 1
    return math.inf


def _check_bound(spec: PotentialSpec, count: int):
    if count > bound_state_count(spec):
        raise UnboundLevelError(
            f"{spec!r} has only {bound_state_count(spec)} bound states, asked for {count}")


def closed_form_eigenvalue(spec: PotentialSpec, j: int) -> float:
    """Exact eigenvalue for box, harmonic and Poschl-Teller."""
    if j < 0:
        raise ValueError("level index must be non-negative")
    if spec.kind == "box":
        return math.pi ** 2 * (j + 1) ** 2 / (2.0 * spec.params["L"] ** 2)
    if spec.kind == "harmonic":
        return spec.params["w"] * (j + 0.5)
    if spec.kind == "poschl_teller":
        lam = pt_lambda(spec.params["D"])
        if j > lam:
            raise UnboundLevelError(f"level {j} exceeds lambda = {lam}")
        return -0.5 * (lam - j) ** 2
    raise NoClosedFormError(f"no closed-form spectrum for {spec.kind}")


def airy_eigenvalue(j: int, prec: PrecisionConfig = PrecisionConfig()) -> mpmath.mpf:
    """Linear half-well level ``-a_{j+1} / 2**(1/3)`` in Hartree, as an mpf."""
    if j < 0:
        raise ValueError("level index must be non-negative")
    if prec.target_digits > 50:
        raise ValueError("Airy oracle supports at most 50 target digits")
    zero = airy.airy_zero(j + 1, prec.target_digits, prec.max_iterations)
    with mpmath.workdps(prec.working_digits):
        return -zero * airy.hartree_scale(prec.working_digits)


# ---------------------------------------------------------------------------
# finite-difference grid solver

def _barrier_edge(spec: PotentialSpec, x0: float, direction: float, eps: float,
                  barrier_action: float) -> float:
    # walk outward until int sqrt(2(v - eps)) dx exceeds barrier_action
    step, total, x = 0.01, 0.0, x0
    prev = 0.0
    while total < barrier_action:
        xn = x + direction * step
        kappa = math.sqrt(max(2.0 * (evaluate(spec, xn) - eps), 0.0))
        total += 0.5 * (prev + kappa) * step
        prev, x = kappa, xn
        step = min(step * 1.2, 0.5)
    return x


def grid_box(spec: PotentialSpec, eps_max: float, barrier_action: float = 20.0):
    """Truncation interval for the grid solver.

    Decaying ends are placed where the tunnelling action beyond the outermost
    turning point at ``eps_max`` reaches ``barrier_action`` (wavefunction
    suppressed by about ``exp(-barrier_action)``); hard walls stay put.
    """
    lo, hi = spec.domain
    if spec.kind == "box":
        return lo, hi
    tp = turning_points(spec, eps_max)
    left = tp.intervals[0].lo
    right = tp.intervals[-1].hi
    if spec.boundary[0] == "decaying":
        left = _barrier_edge(spec, left, -1.0, eps_max, barrier_action)
    if spec.boundary[1] == "decaying":
        right = _barrier_edge(spec, right, 1.0, eps_max, barrier_action)
    return left, right


def _fd_levels(spec: PotentialSpec, left: float, right: float, n: int, count: int):
    h = (right - left) / n
    x = left + h * np.arange(1, n)
    diag = 1.0 / h ** 2 + np.asarray(evaluate(spec, x))
    off = np.full(n - 2, -0.5 / h ** 2)
    return eigh_tridiagonal(diag, off, eigvals_only=True,
                            select="i", select_range=(0, count - 1))


def _richardson_table(spec, left, right, eps_max, count, levels, resolution):
    pmax = math.sqrt(2.0 * max(eps_max - spec.infimum, 1e-300))
    n0 = max(64, int(math.ceil((right - left) * max(pmax, 1.0) / resolution)))
    table = []
    for i in range(levels):
        row = [_fd_levels(spec, left, right, n0 * 2 ** i, count)]
        for k in range(1, i + 1):
            row.append(row[k - 1] + (row[k - 1] - table[i - 1][k - 1]) / (4 ** k - 1))
        table.append(row)
    return table, n0


def _estimate_top(spec: PotentialSpec, count: int) -> float:
    try:
        return wkb_level(spec, count - 1 + 0.5)
    except UnboundLevelError:
        return spec.threshold - 1e-3 * (spec.threshold - spec.infimum)


def grid_eigenvalues(spec: PotentialSpec, count: int,
                     prec: PrecisionConfig = PrecisionConfig(),
                     levels: int = 4, resolution: float = 0.25,
                     barrier_action: float = 20.0) -> Spectrum:
    """Lowest ``count`` eigenvalues by 3-point finite differences, Richardson in h^2.

    ``levels`` grids with spacing halved each time are extrapolated with a
    Neville table.  The per-level error bound is the change made by the last
    extrapolation step plus the eigensolver roundoff, ``eps_mach * ||H||``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    _check_bound(spec, count)
    eps_max = _estimate_top(spec, count)
    for _ in range(4):
        left, right = grid_box(spec, eps_max, barrier_action)
        table, n0 = _richardson_table(spec, left, right, eps_max, count, levels, resolution)
        top = float(table[-1][-1][-1])
        if top >= spec.threshold:
            raise UnboundLevelError(f"level {count - 1} of {spec!r} is not below the continuum")
        if top <= eps_max:
            break
        # the box was sized for a lower energy than the level found
        eps_max = top
    else:
        raise PrecisionError(f"truncation box for {spec!r} did not settle")
    best = table[-1][-1]
    h_fine = (right - left) / (n0 * 2 ** (levels - 1))
    vmax = max(abs(evaluate(spec, left)), abs(evaluate(spec, right)), abs(spec.infimum))
    roundoff = 2.0 * np.finfo(float).eps * (1.0 / h_fine ** 2 + vmax)
    err = np.abs(best - table[-1][-2]) + roundoff
    rel = err / np.maximum(np.abs(best), 1.0)
    digits = int(math.floor(-math.log10(float(rel.max()))))
    required = min(prec.target_digits, GRID_MAX_DIGITS)
    logger.debug("grid solve %r: n0=%d box=[%g, %g] digits=%d", spec, n0, left, right, digits)
    if digits < required:
        raise PrecisionError(
            f"grid extrapolation reached {digits} digits, {required} required for {spec!r}")
    return Spectrum(tuple(float(v) for v in best), "grid_solver", digits,
                    tuple(float(e) for e in err))


# ---------------------------------------------------------------------------

def best_oracle(spec: PotentialSpec) -> str:
    if spec.kind in ("box", "harmonic", "poschl_teller"):
        return "closed_form"
    if spec.kind == "linear_half_well":
        return "airy_zero"
    return "grid_solver"


def spectrum(spec: PotentialSpec, count: int, prec: PrecisionConfig = PrecisionConfig(),
             oracle: str = "auto") -> Spectrum:
    """Lowest ``count`` levels from the requested (or best available) oracle."""
    _check_bound(spec, count)
    source = best_oracle(spec) if oracle == "auto" else oracle
    if source == "closed_form":
        ev = tuple(closed_form_eigenvalue(spec, j) for j in range(count))
        return Spectrum(ev, source, 15, (0.0,) * count)
    if source == "airy_zero":
        if spec.kind != "linear_half_well":
            raise NoClosedFormError("the Airy oracle only covers the linear half-well")
        ev = tuple(airy_eigenvalue(j, prec) for j in range(count))
        return Spectrum(ev, source, prec.target_digits, (0.0,) * count)
    if source == "grid_solver":
        return grid_eigenvalues(spec, count, prec)
    raise ValueError(f"unknown oracle {oracle!r}")


def exact_sum(spec: PotentialSpec, N: int, prec: PrecisionConfig = PrecisionConfig(),
              oracle: str = "auto"):
    """Sum of the lowest ``N`` eigenvalues, accumulated in index order.

    Returns an ``mpmath.mpf`` for the Airy oracle, a float otherwise.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    spec_ = spectrum(spec, N, prec, oracle)
    if spec_.source == "airy_zero":
        with mpmath.workdps(prec.working_digits):
            return mpmath.fsum(spec_.eigenvalues)
    return math.fsum(spec_.eigenvalues)


def airy_zero_sum(N: int, digits: int = 40) -> mpmath.mpf:
    """``sum_{k=1}^{N} |a_k|``: the half-well sum for ``H = p**2 + x``.

    This is ``2**(1/3)`` times the Hartree-unit sum ``exact_sum(linwell, N)``.
    """
    with mpmath.workdps(digits + airy.GUARD_DIGITS):
        return -mpmath.fsum(airy.airy_zero(k, digits) for k in range(1, N + 1))
