"""Hot numeric kernels: numba ``@njit`` versions with a pure-numpy fallback.

Which path runs is decided by the ``SEMISUM_BACKEND`` environment variable
(``numba``, the default when numba imports, or ``numpy``) and can be switched
at runtime with :func:`set_backend`.  Both paths take the same arguments and
must agree to rounding; ``tests/test_kernels.py`` checks that.

Potentials are passed as an integer ``kind`` code plus a float64 ``params``
array so that the compiled kernels need no Python objects.
"""
import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

BOX, HARMONIC, POSCHL_TELLER, LINEAR, QUARTIC = range(5)

# integrand selectors for theta_quadrature
MOMENTUM = 0            # p
INVERSE_MOMENTUM = 1    # 1/p
CURVATURE = 2           # v''/p
MOMENTUM_CUBED = 3      # p**3
MOMENTUM_POTENTIAL = 4  # p*v


# --------------------------------------------------------------------------
# numpy path

def _value_np(kind, params, x):
    x = np.asarray(x, dtype=np.float64)
    if kind == BOX:
        return np.zeros_like(x)
    if kind == HARMONIC:
        w = params[0]
        return 0.5 * w * w * x * x
    if kind == POSCHL_TELLER:
        c = np.cosh(x)
        return -params[0] / (c * c)
    if kind == LINEAR:
        return x.copy()
    if kind == QUARTIC:
        x2 = x * x
        return params[0] * x2 * x2 + params[1] * x2
    raise ValueError(f"unknown potential kind {kind}")


def _deriv_np(kind, params, x, order):
    x = np.asarray(x, dtype=np.float64)
    if kind == BOX:
        return np.zeros_like(x)
    if kind == HARMONIC:
        w2 = params[0] ** 2
        return w2 * x if order == 1 else np.full_like(x, w2)
    if kind == POSCHL_TELLER:
        s2 = 1.0 / np.cosh(x) ** 2
        t = np.tanh(x)
        if order == 1:
            return 2.0 * params[0] * s2 * t
        return 2.0 * params[0] * s2 * (1.0 - 3.0 * t * t)
    if kind == LINEAR:
        return np.ones_like(x) if order == 1 else np.zeros_like(x)
    if kind == QUARTIC:
        a, b = params[0], params[1]
        if order == 1:
            return 4.0 * a * x ** 3 + 2.0 * b * x
        return 12.0 * a * x * x + 2.0 * b
    raise ValueError(f"unknown potential kind {kind}")


def _vdiff_np(kind, params, t, x, d):
    # v(t) - v(x) in factored form; d = t - x is supplied without cancellation
    if kind == HARMONIC:
        return 0.5 * params[0] ** 2 * d * (t + x)
    if kind == POSCHL_TELLER:
        return (params[0] * (np.tanh(t) + np.tanh(x)) * np.sinh(d)
                / (np.cosh(t) * np.cosh(x)))
    if kind == LINEAR:
        return d
    if kind == QUARTIC:
        return d * (t + x) * (params[0] * (t * t + x * x) + params[1])
    return np.zeros_like(x)


def _theta_quadrature_np(kind, params, eps, a, b, lo_smooth, hi_smooth,
                         nodes, weights, what):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    s = np.sin(nodes)
    cos2 = np.cos(nodes) ** 2
    x = c + h * s
    jac = h * np.cos(nodes)
    ke = eps - _value_np(kind, params, x)
    right = s >= 0.0
    if hi_smooth:
        d = h * cos2[right] / (1.0 + s[right])
        ke[right] = _vdiff_np(kind, params, b, x[right], d)
    if lo_smooth:
        d = -h * cos2[~right] / (1.0 - s[~right])
        ke[~right] = _vdiff_np(kind, params, a, x[~right], d)
    two_ke = np.maximum(2.0 * ke, 0.0)
    p = np.sqrt(two_ke)
    if what == MOMENTUM:
        f = p * jac
    elif what == INVERSE_MOMENTUM:
        f = np.where(p > 0.0, jac / np.where(p > 0.0, p, 1.0), 0.0)
    elif what == CURVATURE:
        f = np.where(p > 0.0, jac / np.where(p > 0.0, p, 1.0), 0.0)
        f = f * _deriv_np(kind, params, x, 2)
    elif what == MOMENTUM_CUBED:
        f = p * two_ke * jac
    elif what == MOMENTUM_POTENTIAL:
        f = p * _value_np(kind, params, x) * jac
    else:
        raise ValueError(f"unknown integrand selector {what}")
    return float(np.dot(weights, f))


def _refine_root_np(kind, params, eps, lo, hi, rtol):
    flo = float(_value_np(kind, params, lo)) - eps
    if flo == 0.0:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * max(1.0, abs(mid)):
            break
        fmid = float(_value_np(kind, params, mid)) - eps
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    # two Newton polish steps, kept inside the bracket
    for _ in range(2):
        d = float(_deriv_np(kind, params, x, 1))
        if d == 0.0:
            break
        xn = x - (float(_value_np(kind, params, x)) - eps) / d
        if lo <= xn <= hi:
            x = xn
    return x


# --------------------------------------------------------------------------
# numba path

if numba is not None:
    @numba.njit(cache=True)
    def _v1(kind, params, x):
        if kind == BOX:
            return 0.0
        if kind == HARMONIC:
            return 0.5 * params[0] * params[0] * x * x
        if kind == POSCHL_TELLER:
            c = math.cosh(x)
            return -params[0] / (c * c)
        if kind == LINEAR:
            return x
        x2 = x * x
        return params[0] * x2 * x2 + params[1] * x2

    @numba.njit(cache=True)
    def _d1(kind, params, x, order):
        if kind == BOX:
            return 0.0
        if kind == HARMONIC:
            w2 = params[0] * params[0]
            return w2 * x if order == 1 else w2
        if kind == POSCHL_TELLER:
            c = math.cosh(x)
            s2 = 1.0 / (c * c)
            t = math.tanh(x)
            if order == 1:
                return 2.0 * params[0] * s2 * t
            return 2.0 * params[0] * s2 * (1.0 - 3.0 * t * t)
        if kind == LINEAR:
            return 1.0 if order == 1 else 0.0
        if order == 1:
            return 4.0 * params[0] * x ** 3 + 2.0 * params[1] * x
        return 12.0 * params[0] * x * x + 2.0 * params[1]

    @numba.njit(cache=True)
    def _value_nb(kind, params, x):
        out = np.empty_like(x)
        for i in range(x.size):
            out.flat[i] = _v1(kind, params, x.flat[i])
        return out

    @numba.njit(cache=True)
    def _deriv_nb(kind, params, x, order):
        out = np.empty_like(x)
        for i in range(x.size):
            out.flat[i] = _d1(kind, params, x.flat[i], order)
        return out

    @numba.njit(cache=True)
    def _vdiff1(kind, params, t, x, d):
        if kind == HARMONIC:
            return 0.5 * params[0] * params[0] * d * (t + x)
        if kind == POSCHL_TELLER:
            return (params[0] * (math.tanh(t) + math.tanh(x)) * math.sinh(d)
                    / (math.cosh(t) * math.cosh(x)))
        if kind == LINEAR:
            return d
        if kind == QUARTIC:
            return d * (t + x) * (params[0] * (t * t + x * x) + params[1])
        return 0.0

    @numba.njit(cache=True)
    def _theta_quadrature_nb(kind, params, eps, a, b, lo_smooth, hi_smooth,
                             nodes, weights, what):
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)
        total = 0.0
        for i in range(nodes.size):
            s = math.sin(nodes[i])
            cs = math.cos(nodes[i])
            x = c + h * s
            jac = h * cs
            if s >= 0.0 and hi_smooth:
                ke = _vdiff1(kind, params, b, x, h * cs * cs / (1.0 + s))
            elif s < 0.0 and lo_smooth:
                ke = _vdiff1(kind, params, a, x, -h * cs * cs / (1.0 - s))
            else:
                ke = eps - _v1(kind, params, x)
            two_ke = 2.0 * ke
            if two_ke < 0.0:
                two_ke = 0.0
            p = math.sqrt(two_ke)
            if what == MOMENTUM:
                f = p * jac
            elif what == INVERSE_MOMENTUM:
                f = jac / p if p > 0.0 else 0.0
            elif what == CURVATURE:
                f = _d1(kind, params, x, 2) * jac / p if p > 0.0 else 0.0
            elif what == MOMENTUM_CUBED:
                f = p * two_ke * jac
            else:
                f = p * _v1(kind, params, x) * jac
            total += weights[i] * f
        return total

    @numba.njit(cache=True)
    def _refine_root_nb(kind, params, eps, lo, hi, rtol):
        flo = _v1(kind, params, lo) - eps
        if flo == 0.0:
            return lo
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo <= rtol * max(1.0, abs(mid)):
                break
            fmid = _v1(kind, params, mid) - eps
            if (fmid < 0.0) == (flo < 0.0):
                lo = mid
                flo = fmid
            else:
                hi = mid
        x = 0.5 * (lo + hi)
        for _ in range(2):
            d = _d1(kind, params, x, 1)
            if d == 0.0:
                break
            xn = x - (_v1(kind, params, x) - eps) / d
            if lo <= xn <= hi:
                x = xn
        return x


# --------------------------------------------------------------------------
# dispatch

_BACKENDS = ("numba", "numpy")
_backend = None


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"`` for all subsequent kernel calls."""
    global _backend
    if name not in _BACKENDS:
        raise ValueError(f"backend must be one of {_BACKENDS}, got {name!r}")
    if name == "numba" and numba is None:
        raise ValueError("numba is not importable")
    _backend = name


def get_backend():
    return _backend


set_backend(os.environ.get("SEMISUM_BACKEND",
                           "numba" if numba is not None else "numpy").lower())


def potential_value(kind, params, x):
    """Potential on an array (or scalar) of positions; returns an ndarray."""
    x = np.asarray(x, dtype=np.float64)
    if _backend == "numba":
        return _value_nb(kind, params, np.atleast_1d(x)).reshape(x.shape)
    return _value_np(kind, params, x)


def potential_derivative(kind, params, x, order):
    x = np.asarray(x, dtype=np.float64)
    if _backend == "numba":
        return _deriv_nb(kind, params, np.atleast_1d(x), order).reshape(x.shape)
    return _deriv_np(kind, params, x, order)


def theta_quadrature(kind, params, eps, a, b, lo_smooth, hi_smooth, nodes, weights, what):
    """Gauss rule for an integrand over ``[a, b]`` after ``x = c + h sin(theta)``.

    ``nodes``/``weights`` live on ``[-pi/2, pi/2]``.  The substitution turns the
    square-root behaviour of ``p`` at a smooth turning point into an analytic
    function of theta, so the rule converges geometrically for all selectors.
    Near a smooth end the kinetic energy is formed as ``v(end) - v(x)`` in
    factored form, which avoids the cancellation in ``eps - v(x)``.
    """
    args = (kind, params, float(eps), float(a), float(b), bool(lo_smooth),
            bool(hi_smooth), nodes, weights, what)
    if _backend == "numba":
        return _theta_quadrature_nb(*args)
    return _theta_quadrature_np(*args)


def refine_root(kind, params, eps, lo, hi, rtol):
    """Root of ``v(x) = eps`` in a sign-changing bracket: bisection, then Newton."""
    if _backend == "numba":
        return _refine_root_nb(kind, params, float(eps), float(lo), float(hi), rtol)
    return _refine_root_np(kind, params, float(eps), float(lo), float(hi), rtol)
