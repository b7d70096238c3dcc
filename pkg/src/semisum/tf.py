"""Local and gradient-corrected kinetic functionals for spin-polarized 1D fermions.

Thomas-Fermi: ``T_TF = (pi**2/6) int n**3``.  Von Weizsaecker:
``T_vW = (1/8) int n'**2 / n``.  The gradient expansion keeps ``T_TF - T_vW/3``.

The self-consistent TF density is local, ``n = p(mu, x) / pi``, so the
particle count is ``action(mu) / pi`` and the TF energy is
``int [p**3 / (6 pi) + p v / pi] dx``, both evaluated with the turning-point
aware theta rule from :mod:`semisum.wkb`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _kernels as K
from .errors import NormalizationError, PrecisionError
from .potentials import PotentialSpec, evaluate, turning_points
from .wkb import _action_limit, action_integral, region_integral

NORM_RTOL = 1e-8
VW_CUTOFF = 1e-12
MARGIN = 0.2
# the Samaj-Percus correction is flagged once |v''| / p**4 exceeds this
SP_DIVERGENCE = 1.0


def _uniform_step(grid: np.ndarray) -> Optional[float]:
    d = np.diff(grid)
    h = d.mean()
    return h if np.allclose(d, h, rtol=1e-9, atol=0.0) else None


def integrate(grid, values, period: Optional[float] = None) -> float:
    """Composite trapezoid, with one Richardson step on odd-length uniform grids.

    For a periodic profile (``period`` set, grid excluding the right end)
    the plain sum times the spacing is already spectrally accurate.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if period is not None:
        return float(values.sum() * period / len(values))
    fine = np.trapezoid(values, grid)
    if len(grid) >= 5 and len(grid) % 2 == 1 and _uniform_step(grid) is not None:
        coarse = np.trapezoid(values[::2], grid[::2])
        return float(fine + (fine - coarse) / 3.0)
    return float(fine)


@dataclass(frozen=True)
class DensityProfile:
    """Density on a grid, normalised to ``particle_number``.

    A periodic profile samples one cell ``[x0, x0 + period)`` on a uniform
    grid that excludes the right end.
    """

    grid: np.ndarray
    values: np.ndarray
    particle_number: float
    mu: Optional[float] = None
    period: Optional[float] = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or len(grid) < 3:
            raise ValueError("grid and values must be 1D arrays of equal length >= 3")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("density values must be finite and non-negative")
        for a in (grid, values):
            a.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        norm = self.integrate(values)
        if abs(norm - self.particle_number) > NORM_RTOL * max(abs(self.particle_number), 1e-300):
            raise NormalizationError(
                f"density integrates to {norm!r}, expected {self.particle_number!r}")

    def integrate(self, f) -> float:
        return integrate(self.grid, f, self.period)

    def gradient(self) -> np.ndarray:
        if self.period is not None:
            h = self.period / len(self.values)
            return (np.roll(self.values, -1) - np.roll(self.values, 1)) / (2.0 * h)
        return np.gradient(self.values, self.grid, edge_order=2)


def tf_kinetic(n: DensityProfile) -> float:
    """``(pi**2 / 6) int n**3``."""
    return math.pi ** 2 / 6.0 * n.integrate(n.values ** 3)


@dataclass(frozen=True)
class VwDiagnostics:
    excluded_points: int
    excluded_mass: float


def vw_kinetic(n: DensityProfile, full_output: bool = False):
    """``(1/8) int n'**2 / n``, skipping points where ``n < 1e-12 max(n)``.

    With ``full_output`` also returns a :class:`VwDiagnostics` with the number
    of skipped points and the particle number they carry.
    """
    dn = n.gradient()
    keep = n.values >= VW_CUTOFF * n.values.max() if n.values.max() > 0 else np.zeros_like(dn, bool)
    integrand = np.zeros_like(dn)
    integrand[keep] = dn[keep] ** 2 / n.values[keep]
    value = n.integrate(integrand) / 8.0
    if not full_output:
        return value
    diag = VwDiagnostics(int((~keep).sum()), n.integrate(np.where(keep, 0.0, n.values)))
    return value, diag


def gea_kinetic(n: DensityProfile) -> float:
    """Second-order gradient expansion ``T_TF - T_vW / 3``."""
    return tf_kinetic(n) - vw_kinetic(n) / 3.0


# ---------------------------------------------------------------------------
# potential-based (Samaj-Percus) expansions

def _sp_pieces(spec, mu, x):
    v = np.asarray(spec.value(x), dtype=float)
    vpp = np.asarray(spec.derivative(x, 2), dtype=float)
    p = np.sqrt(np.maximum(2.0 * (mu - v), 0.0))
    allowed = p > 0
    ratio = np.where(allowed, vpp / np.where(allowed, p, 1.0) ** 4, 0.0)
    divergent = allowed & (np.abs(ratio) > SP_DIVERGENCE)
    return p, ratio, divergent


def _shape(out, x):
    return float(out) if np.ndim(x) == 0 else out


def sp_density(spec, mu: float, x, full_output: bool = False):
    """``(p/pi) [1 + v''/(12 p**4)]`` at chemical potential ``mu``; 0 where forbidden.

    ``full_output`` adds a boolean mask of points where ``|v''| > p**4``,
    i.e. where the correction is no longer small.
    """
    p, ratio, divergent = _sp_pieces(spec, mu, x)
    out = p / math.pi * (1.0 + ratio / 12.0)
    if full_output:
        return _shape(out, x), (bool(divergent) if np.ndim(x) == 0 else divergent)
    return _shape(out, x)


def sp_kinetic_density(spec, mu: float, x, full_output: bool = False):
    """``(p**3 / (2 pi)) [1/3 + v''/(4 p**4)]``; same conventions as :func:`sp_density`."""
    p, ratio, divergent = _sp_pieces(spec, mu, x)
    out = p ** 3 / (2.0 * math.pi) * (1.0 / 3.0 + ratio / 4.0)
    if full_output:
        return _shape(out, x), (bool(divergent) if np.ndim(x) == 0 else divergent)
    return _shape(out, x)


# ---------------------------------------------------------------------------
# self-consistent Thomas-Fermi

def tf_particle_count(spec: PotentialSpec, mu: float) -> float:
    """``int p(mu, x) dx / pi``, zero at or below the band bottom."""
    if mu <= spec.infimum:
        return 0.0
    return action_integral(spec, mu) / math.pi


def _bisect(f, lo, hi, rtol, maxiter=400):
    flo = f(lo)
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * max(abs(mid), 1e-300) or mid in (lo, hi):
            return mid
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tf_chemical_potential(spec: PotentialSpec, N: float, rtol: float = 1e-13) -> float:
    """``mu`` with ``tf_particle_count(mu) = N``, by bisection on the monotone count."""
    if not N > 0:
        raise NormalizationError("particle number must be positive")
    lo = spec.infimum
    if math.isfinite(spec.threshold):
        hi = spec.threshold
        if _action_limit(spec) / math.pi <= N:
            raise NormalizationError(f"{spec!r} holds fewer than {N} TF particles")
    else:
        hi = lo + 1.0
        while tf_particle_count(spec, hi) < N:
            hi = lo + 2.0 * (hi - lo)
    return _bisect(lambda m: tf_particle_count(spec, m) - N, lo, hi, rtol)


def _tf_grid(spec: PotentialSpec, mu: float, points: int) -> np.ndarray:
    tp = turning_points(spec, mu)
    a, b = tp.intervals[0].lo, tp.intervals[-1].hi
    lo, hi = spec.domain
    pad = MARGIN * (b - a)
    return np.linspace(max(lo, a - pad), min(hi, b + pad), points)


def _tf_values(spec, mu, grid):
    return np.sqrt(np.maximum(2.0 * (mu - np.asarray(evaluate(spec, grid))), 0.0)) / math.pi


def tf_scf(spec: PotentialSpec, N: float, points: int = 100001,
           rtol: float = 1e-10) -> DensityProfile:
    """Self-consistent TF density ``sqrt(2(mu - v)) / pi`` holding ``N`` particles.

    The grid is uniform over the allowed region plus a 20% margin on each
    side (clipped to the domain).  ``mu`` is bisected until the grid
    quadrature of the density equals ``N`` to ``rtol``.
    """
    if points < 5 or points % 2 == 0:
        raise ValueError("points must be odd and >= 5")
    mu0 = tf_chemical_potential(spec, N)
    grid = _tf_grid(spec, mu0, points)

    def excess(mu):
        return integrate(grid, _tf_values(spec, mu, grid)) - N

    # the grid count differs from the exact one only by edge quadrature error
    width = 1e-6 * max(abs(mu0), mu0 - spec.infimum)
    lo, hi = mu0 - width, mu0 + width
    for _ in range(60):
        if excess(lo) < 0 < excess(hi):
            break
        width *= 4.0
        lo = max(mu0 - width, spec.infimum)
        hi = min(mu0 + width, np.nextafter(spec.threshold, -math.inf))
    else:
        raise NormalizationError(f"cannot bracket the grid chemical potential for {spec!r}")
    mu = _bisect(excess, lo, hi, 1e-15)
    values = _tf_values(spec, mu, grid)
    norm = integrate(grid, values)
    if abs(norm - N) > rtol * N:
        raise NormalizationError(f"grid normalisation {norm!r} missed N = {N} for {spec!r}")
    return DensityProfile(grid, values, norm, mu)


@dataclass(frozen=True)
class TfEnergy:
    mu: float
    kinetic: float
    potential: float

    @property
    def total(self) -> float:
        return self.kinetic + self.potential


def tf_energy_parts(spec: PotentialSpec, N: float) -> TfEnergy:
    """Kinetic ``int p**3 / (6 pi)`` and potential ``int p v / pi`` TF energies.

    Both use the theta rule at the TF chemical potential, which is exact to
    rounding at the square-root edges of the density.
    """
    mu = tf_chemical_potential(spec, N)
    cubed = region_integral(spec, mu, K.MOMENTUM_CUBED)
    pv = region_integral(spec, mu, K.MOMENTUM_POTENTIAL)
    return TfEnergy(mu, cubed / (6.0 * math.pi), pv / math.pi)


def tf_total_energy(spec: PotentialSpec, N: float) -> float:
    """TF energy ``T_TF[n] + int n v`` of the self-consistent density."""
    return tf_energy_parts(spec, N).total


def tf_energy_on_grid(spec: PotentialSpec, n: DensityProfile) -> float:
    """TF energy functional evaluated on a sampled density."""
    return tf_kinetic(n) + n.integrate(n.values * np.asarray(evaluate(spec, n.grid)))


# ---------------------------------------------------------------------------
# periodic cosine cell

@dataclass(frozen=True)
class CosineCell:
    """``v(x) = eta cos(2 pi x / L)`` repeated with period ``L``."""

    eta: float
    L: float

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("cell length must be positive")

    @property
    def q(self) -> float:
        return 2.0 * math.pi / self.L

    def value(self, x):
        return self.eta * np.cos(self.q * np.asarray(x, dtype=float))

    def derivative(self, x, order: int):
        x = np.asarray(x, dtype=float)
        if order == 1:
            return -self.eta * self.q * np.sin(self.q * x)
        if order == 2:
            return -self.eta * self.q ** 2 * np.cos(self.q * x)
        raise ValueError("derivative order must be 1 or 2")


@dataclass(frozen=True)
class BandResult:
    energy: float
    kinetic: float
    density: DensityProfile
    k_points: int


def _band_pass(cell: CosineCell, N: int, nk: int, planes: int, x: np.ndarray):
    t, w = np.polynomial.legendre.leggauss(nk)
    # eps(k) = eps(-k) and every band touching sits at k = 0 or k = q/2,
    # so Gauss-Legendre on [0, q/2] sees an analytic band sum
    ks = 0.25 * cell.q * (t + 1.0)
    ws = 0.5 * w
    m = np.arange(-planes, planes + 1)
    phase = np.exp(1j * np.outer(m * cell.q, x))
    off = np.full(2 * planes, 0.5 * cell.eta)
    energy = pot = 0.0
    n = np.zeros_like(x)
    for k, wk in zip(ks, ws):
        ev, vec = eigh_tridiagonal(0.5 * (k + m * cell.q) ** 2, off,
                                   select="i", select_range=(0, N - 1))
        energy += wk * ev.sum()
        # <cos(qx)> couples neighbouring plane waves with weight 1/2 each way
        pot += wk * cell.eta * np.sum(vec[:-1] * vec[1:])
        n += wk * np.sum(np.abs(vec.T @ phase) ** 2, axis=0) / cell.L
    return energy, energy - pot, n


def cosine_cell_bands(cell: CosineCell, N: int, points: int = 2048, planes: Optional[int] = None,
                      rtol: float = 1e-11, max_k: int = 4096) -> BandResult:
    """Exact kinetic energy and density per cell for ``N`` filled bands.

    The Hamiltonian is tridiagonal in the plane-wave basis ``exp(i(k + mq)x)``;
    band sums are integrated over the Brillouin zone, doubling the number of
    k points until the kinetic energy settles to ``rtol``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    planes = planes or (4 * N + 40)
    x = np.arange(points) * cell.L / points
    nk = 16
    prev = _band_pass(cell, N, nk, planes, x)
    while True:
        nk *= 2
        cur = _band_pass(cell, N, nk, planes, x)
        if abs(cur[1] - prev[1]) <= rtol * abs(cur[1]):
            break
        if nk >= max_k:
            raise PrecisionError(f"Brillouin-zone sum unconverged at {nk} k points")
        prev = cur
    energy, kinetic, n = cur
    profile = DensityProfile(x, n, integrate(x, n, cell.L), period=cell.L)
    return BandResult(energy, kinetic, profile, nk)


@dataclass(frozen=True)
class GeaRow:
    eta: float
    t_exact: float
    t_tf: float
    t_vw: float
    t_gea: float

    @property
    def ratio(self) -> float:
        """``|T_GEA - T| / |T_TF - T|``."""
        return abs(self.t_gea - self.t_exact) / abs(self.t_tf - self.t_exact)


def gea_study(etas=(0.5, 0.2, 0.05), N: int = 5, L: float = 10.0, points: int = 2048):
    """Functionals of the exact periodic density against its exact kinetic energy."""
    rows = []
    for eta in etas:
        res = cosine_cell_bands(CosineCell(float(eta), L), N, points)
        n = res.density
        tvw = vw_kinetic(n)
        rows.append(GeaRow(float(eta), res.kinetic, tf_kinetic(n), tvw, tf_kinetic(n) - tvw / 3.0))
    return rows
