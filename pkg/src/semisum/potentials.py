"""Catalog of 1D potentials: values, analytic derivatives, momenta, turning points.

All quantities are in Hartree atomic units (hbar = m = 1).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import _kernels as K
from .errors import (DomainError, NoAllowedRegionError, NotSupportedError,
                     UnboundLevelError, UsageError)

KINDS = ("box", "harmonic", "poschl_teller", "linear_half_well", "quartic")

_KIND_CODE = {
    "box": K.BOX,
    "harmonic": K.HARMONIC,
    "poschl_teller": K.POSCHL_TELLER,
    "linear_half_well": K.LINEAR,
    "quartic": K.QUARTIC,
}
_PARAM_NAMES = {
    "box": ("L",),
    "harmonic": ("w",),
    "poschl_teller": ("D",),
    "linear_half_well": (),
    "quartic": ("a", "b"),
}
_PARAM_DEFAULTS = {"quartic": {"b": 0.0}}

# root tolerance for turning points, relative to max(1, |x|)
ROOT_RTOL = 1e-15


@dataclass(frozen=True)
class PotentialSpec:
    """A named catalog potential with its parameters.

    Construct with keyword parameters, e.g. ``PotentialSpec("poschl_teller", {"D": 10})``,
    or parse a CLI string with :meth:`parse`.
    """

    kind: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        names = _PARAM_NAMES[self.kind]
        merged = dict(_PARAM_DEFAULTS.get(self.kind, {}))
        merged.update({k: float(v) for k, v in dict(self.params).items()})
        extra = set(merged) - set(names)
        missing = set(names) - set(merged)
        if extra or missing:
            raise ValueError(f"{self.kind} takes parameters {names}, got {sorted(merged)}")
        positive = {"box": "L", "harmonic": "w", "poschl_teller": "D", "quartic": "a"}
        name = positive.get(self.kind)
        if name is not None and not merged[name] > 0:
            raise ValueError(f"{self.kind} requires {name} > 0")
        object.__setattr__(self, "params", MappingProxyType(merged))

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items()))))

    def __eq__(self, other):
        return (isinstance(other, PotentialSpec) and self.kind == other.kind
                and dict(self.params) == dict(other.params))

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"PotentialSpec({self.kind}{': ' + inner if inner else ''})"

    @classmethod
    def parse(cls, text: str) -> "PotentialSpec":
        """Parse ``pt:D=<real>``, ``box:L=<real>``, ``harm:w=<real>``, ``linwell``,
        ``quartic:a=<real>,b=<real>``."""
        return parse_potential(text)

    # kernel-facing representation
    @property
    def code(self) -> int:
        return _KIND_CODE[self.kind]

    @property
    def param_array(self) -> np.ndarray:
        arr = np.array([self.params[n] for n in _PARAM_NAMES[self.kind]] or [0.0],
                       dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @property
    def domain(self) -> tuple[float, float]:
        if self.kind == "box":
            return (0.0, self.params["L"])
        if self.kind == "linear_half_well":
            return (0.0, math.inf)
        return (-math.inf, math.inf)

    @property
    def boundary(self) -> tuple[str, str]:
        if self.kind == "box":
            return ("hard_wall", "hard_wall")
        if self.kind == "linear_half_well":
            return ("hard_wall", "decaying")
        return ("decaying", "decaying")

    @property
    def infimum(self) -> float:
        """Infimum of the potential on its domain."""
        if self.kind == "poschl_teller":
            return -self.params["D"]
        if self.kind == "quartic" and self.params["b"] < 0:
            a, b = self.params["a"], self.params["b"]
            return -b * b / (4.0 * a)
        return 0.0

    @property
    def threshold(self) -> float:
        """Energy above which the allowed region is unbounded (inf if confining)."""
        return 0.0 if self.kind == "poschl_teller" else math.inf

    def value(self, x):
        return evaluate(self, x)

    def derivative(self, x, order: int):
        return derivatives(self, x, order)


_ALIASES = {"pt": "poschl_teller", "box": "box", "harm": "harmonic",
            "linwell": "linear_half_well", "quartic": "quartic"}
_TOKEN = re.compile(r"^([A-Za-z]+)=([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)$")


def parse_potential(text: str) -> PotentialSpec:
    head, _, tail = text.partition(":")
    kind = _ALIASES.get(head.strip())
    if kind is None:
        raise UsageError(f"unknown potential {head!r} in {text!r}")
    params = {}
    if tail:
        for token in tail.split(","):
            m = _TOKEN.match(token.strip())
            if m is None:
                raise UsageError(f"malformed potential parameter {token!r} in {text!r}")
            params[m.group(1)] = float(m.group(2))
    elif ":" in text:
        raise UsageError(f"malformed potential spec {text!r}")
    try:
        return PotentialSpec(kind, params)
    except ValueError as exc:
        raise UsageError(f"invalid potential {text!r}: {exc}") from None


def _check_domain(spec: PotentialSpec, x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    lo, hi = spec.domain
    if np.any(arr < lo) or np.any(arr > hi) or np.any(np.isnan(arr)):
        raise DomainError(f"x outside domain [{lo}, {hi}] of {spec!r}")
    return arr


def _out(arr, x):
    return float(arr) if np.ndim(x) == 0 else arr


def evaluate(spec: PotentialSpec, x):
    """Potential value v(x) in Hartree; scalar in, scalar out."""
    arr = _check_domain(spec, x)
    return _out(K.potential_value(spec.code, spec.param_array, arr), x)


def derivatives(spec: PotentialSpec, x, order: int):
    """Closed-form first or second derivative of the potential."""
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order!r}")
    arr = _check_domain(spec, x)
    return _out(K.potential_derivative(spec.code, spec.param_array, arr, order), x)


def classical_momentum(spec: PotentialSpec, eps: float, x):
    """sqrt(2(eps - v(x))) in the allowed region, 0 where v(x) > eps."""
    v = np.asarray(evaluate(spec, x))
    return _out(np.sqrt(np.maximum(2.0 * (eps - v), 0.0)), x)


@dataclass(frozen=True)
class AllowedInterval:
    lo: float
    hi: float
    lo_kind: str  # "smooth" or "wall"
    hi_kind: str


@dataclass(frozen=True)
class TurningPoints:
    """Smooth turning points, hard walls, and the allowed intervals they bound."""

    points: tuple[float, ...]
    walls: tuple[float, ...]
    intervals: tuple[AllowedInterval, ...]

    @property
    def region(self) -> tuple[float, float]:
        """The single allowed interval; raises if the region is disconnected."""
        if len(self.intervals) != 1:
            raise NotSupportedError(
                f"allowed region has {len(self.intervals)} disjoint intervals")
        iv = self.intervals[0]
        return iv.lo, iv.hi


def _monotone_pieces(spec: PotentialSpec):
    lo, hi = spec.domain
    if spec.kind == "box":
        return []
    if spec.kind == "linear_half_well":
        return [(0.0, math.inf)]
    if spec.kind == "quartic" and spec.params["b"] < 0:
        m = math.sqrt(-spec.params["b"] / (2.0 * spec.params["a"]))
        return [(-math.inf, -m), (-m, 0.0), (0.0, m), (m, math.inf)]
    return [(-math.inf, 0.0), (0.0, math.inf)]


def _finite_end(spec: PotentialSpec, x: float, eps: float) -> float:
    # push an infinite piece end out until the potential exceeds eps
    r = 1.0
    while True:
        cand = math.copysign(r, x)
        if evaluate(spec, cand) > eps:
            return cand
        r *= 2.0
        if r > 1e300:
            raise UnboundLevelError(f"energy {eps} reaches the continuum of {spec!r}")


def turning_points(spec: PotentialSpec, eps: float, rtol: float = ROOT_RTOL) -> TurningPoints:
    """All solutions of v(x) = eps, with hard walls flagged separately.

    Each monotone piece of the potential is checked for a sign change of
    v - eps, bisected, then Newton-polished to ``rtol * max(1, |x|)``.
    """
    eps = float(eps)
    if not eps > spec.infimum:
        raise NoAllowedRegionError(
            f"energy {eps} is not above the infimum {spec.infimum} of {spec!r}")
    if eps >= spec.threshold:
        raise UnboundLevelError(f"energy {eps} is in the continuum of {spec!r}")
    code, par = spec.code, spec.param_array
    roots = []
    for a, b in _monotone_pieces(spec):
        if math.isinf(a):
            a = _finite_end(spec, a, eps)
        if math.isinf(b):
            b = _finite_end(spec, b, eps)
        fa, fb = evaluate(spec, a) - eps, evaluate(spec, b) - eps
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0.0:
            roots.append(K.refine_root(code, par, eps, a, b, rtol))
    roots = sorted(set(roots))

    lo, hi = spec.domain
    walls = tuple(w for w, kind in zip((lo, hi), spec.boundary) if kind == "hard_wall")
    edges = ([(lo, "wall")] if lo in walls else []) + [(r, "smooth") for r in roots]
    edges += [(hi, "wall")] if hi in walls else []
    intervals = []
    for (xa, ka), (xb, kb) in zip(edges[:-1], edges[1:]):
        if xb > xa and evaluate(spec, 0.5 * (xa + xb)) < eps:
            intervals.append(AllowedInterval(xa, xb, ka, kb))
    return TurningPoints(tuple(roots), walls, tuple(intervals))


def maslov_index(spec: PotentialSpec) -> Fraction:
    """Quantization offset: 1/2 per hard wall plus 1/4 per smooth turning point."""
    if spec.kind == "box":
        return Fraction(1)
    if spec.kind == "linear_half_well":
        return Fraction(3, 4)
    return Fraction(1, 2)


def interval_maslov(interval: AllowedInterval) -> Fraction:
    return sum((Fraction(1, 2) if k == "wall" else Fraction(1, 4)
                for k in (interval.lo_kind, interval.hi_kind)), Fraction(0))
