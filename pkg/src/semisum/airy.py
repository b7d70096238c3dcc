"""Arbitrary-precision Airy functions, their zeros, and the smooth Airy level function.

Values are ``mpmath.mpf`` numbers; mpmath supplies only the multiprecision
float type and elementary functions here, the Airy evaluation itself is a
Maclaurin series (with cancellation-aware guard digits) or, where it is
accurate enough, the large-argument oscillatory expansion.

The linear half-well ``v(x) = x`` (x > 0, hard wall at 0) has Hartree-unit
eigenvalues ``eps_j = -a_{j+1} / 2**(1/3)``, where ``a_k`` is the k-th zero of
Ai.  The same levels continue to non-integer ``j`` through the Airy phase:
``u(j)`` solves ``cos(pi j) Ai(-u) - sin(pi j) Bi(-u) = 0`` on the branch
nearest the WKB estimate, and ``du/dj = pi**2 (Ai(-u)**2 + Bi(-u)**2)``.
"""
from __future__ import annotations

import math

import mpmath
from mpmath import mpf

from .errors import PrecisionError

GUARD_DIGITS = 8


def _consts():
    # Ai(0) and -Ai'(0) at the current working precision
    c1 = 1 / (mpmath.cbrt(9) * mpmath.gamma(mpf(2) / 3))
    c2 = 1 / (mpmath.cbrt(3) * mpmath.gamma(mpf(1) / 3))
    return c1, c2


def _maclaurin(z: mpf):
    tiny = mpf(10) ** (-mpmath.mp.dps - 2)
    z3 = z ** 3
    f, fp, g, gp = mpf(1), mpf(0), z, mpf(1)
    tf, tg = mpf(1), z          # terms of f and g
    tfp, tgp = None, mpf(1)     # terms of f' and g'
    k = 0
    while True:
        tf = tf * z3 / ((3 * k + 2) * (3 * k + 3))
        tg = tg * z3 / ((3 * k + 3) * (3 * k + 4))
        tgp = tgp * z3 / ((3 * k + 1) * (3 * k + 3))
        tfp = z * z / 2 if k == 0 else tfp * (k + 1) * z3 / (k * (3 * k + 2) * (3 * k + 3))
        f += tf
        g += tg
        fp += tfp
        gp += tgp
        k += 1
        if max(abs(tf), abs(tg), abs(tfp), abs(tgp)) < tiny and k > 2:
            break
    c1, c2 = _consts()
    s3 = mpmath.sqrt(3)
    return (c1 * f - c2 * g, c1 * fp - c2 * gp, s3 * (c1 * f + c2 * g), s3 * (c1 * fp + c2 * gp))


def _asymptotic(x: mpf):
    """Oscillatory expansion for Ai(-x), Ai'(-x), Bi(-x), Bi'(-x), x > 0.

    Returns None when the smallest term is not below the working precision.
    """
    zeta = 2 * x * mpmath.sqrt(x) / 3
    tol = mpf(10) ** (-mpmath.mp.dps - 2)
    # P, Q for the function; R, S for the derivative (DLMF 9.7.9-9.7.12)
    P = Q = R = S = mpf(0)
    u, k, prev = mpf(1), 0, mpmath.inf
    while True:
        v = -u * (6 * k + 1) / (6 * k - 1) if k else mpf(1)
        term = u / zeta ** k
        vterm = v / zeta ** k
        if abs(term) >= prev:
            return None
        prev = abs(term)
        sign = -1 if (k // 2) % 2 else 1
        if k % 2 == 0:
            P += sign * term
            R += sign * vterm
        else:
            Q += sign * term
            S += sign * vterm
        if abs(term) < tol and abs(vterm) < tol:
            break
        k += 1
        u = u * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
    phase = zeta - mpmath.pi / 4
    c, s = mpmath.cos(phase), mpmath.sin(phase)
    amp = 1 / mpmath.sqrt(mpmath.pi)
    x4 = mpmath.root(x, 4)
    ai = amp / x4 * (c * P + s * Q)
    aip = amp * x4 * (s * R - c * S)
    bi = amp / x4 * (-s * P + c * Q)
    bip = amp * x4 * (c * R + s * S)
    # d/dz at z = -x: Ai'(-x) as a derivative in z
    return ai, aip, bi, bip


def airy_ai_bi(z, dps: int = 30):
    """``(Ai(z), Ai'(z), Bi(z), Bi'(z))`` for real ``z`` to ``dps`` digits."""
    with mpmath.workdps(dps + 4):
        z = mpf(z)
        x = -z
        if x > 0 and 4 * float(x) ** 1.5 / 3 > (dps + 6) * math.log(10):
            out = _asymptotic(x)
            if out is not None:
                return tuple(+v for v in out)
    # Maclaurin series loses about (2/3)|z|^1.5 / ln 10 digits to cancellation
    extra = int(2 * abs(float(z)) ** 1.5 / (3 * math.log(10))) + 6
    with mpmath.workdps(dps + extra):
        out = _maclaurin(mpf(z))
    with mpmath.workdps(dps):
        return tuple(+v for v in out)


def _zero_guess(k: int) -> mpf:
    t = 3 * mpmath.pi * (4 * k - 1) / 8
    t2 = 1 / t ** 2
    series = (1 + t2 * (mpf(5) / 48 + t2 * (-mpf(5) / 36 + t2 * (
        mpf(77125) / 82944 + t2 * (-mpf(108056875) / 6967296
                                   + t2 * mpf(162375596875) / 334430208)))))
    return -t ** (mpf(2) / 3) * series


def airy_zero(k: int, digits: int = 30, max_iterations: int = 60) -> mpf:
    """k-th zero (k >= 1) of Ai, Newton-refined and certified to ``digits``.

    Certification: ``|Ai(a)| < 10**-digits * |Ai'(a)|`` at the returned point.
    """
    if k < 1:
        raise ValueError(f"Airy zero index must be >= 1, got {k}")
    dps = digits + GUARD_DIGITS
    with mpmath.workdps(dps):
        z = _zero_guess(k)
        tol = mpf(10) ** (-(digits + 4)) * max(1, abs(z))
        for _ in range(max_iterations):
            ai, aip, _, _ = airy_ai_bi(z, dps)
            step = ai / aip
            z -= step
            if abs(step) < tol:
                break
        else:
            raise PrecisionError(f"Airy zero {k} did not converge in {max_iterations} steps")
        ai, aip, _, _ = airy_ai_bi(z, dps)
        if not abs(ai) < mpf(10) ** (-digits) * abs(aip):
            raise PrecisionError(f"Airy zero {k} failed its residual certificate")
        return +z


def hartree_scale(dps: int) -> mpf:
    """``2**(-1/3)``: converts ``|a_k|`` to linear-half-well energies in Hartree."""
    with mpmath.workdps(dps):
        return 1 / mpmath.cbrt(2)


# ---------------------------------------------------------------------------
# smooth level function u(j) for non-integer j

def _phase_residual(u: mpf, j: mpf, dps: int):
    ai, aip, bi, bip = airy_ai_bi(-u, dps)
    c, s = mpmath.cospi(j), mpmath.sinpi(j)
    return c * ai - s * bi, -(c * aip - s * bip)


def level_position(j, dps: int = 30, max_iterations: int = 60) -> mpf:
    """``u(j)`` with ``u(j) = -a_{j+1}`` at integers; ``j > -3/4``."""
    with mpmath.workdps(dps + GUARD_DIGITS):
        j = mpf(j)
        if not j > -mpf(3) / 4:
            raise ValueError("level function is defined here for j > -3/4")
        u = (3 * mpmath.pi / 2 * (j + mpf(3) / 4)) ** (mpf(2) / 3)
        tol = mpf(10) ** (-(dps + 2)) * max(1, u)
        for _ in range(max_iterations):
            g, gp = _phase_residual(u, j, dps + GUARD_DIGITS)
            step = g / gp
            u -= step
            if abs(step) < tol:
                return +u
    raise PrecisionError(f"level position at j={j} did not converge")


def _series_mul(a, b, n):
    return [mpmath.fsum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)]


def _series_recip(a, n):
    out = [1 / a[0]]
    for k in range(1, n):
        out.append(-mpmath.fsum(a[i] * out[k - i] for i in range(1, k + 1)) / a[0])
    return out


def _airy_taylor(z0: mpf, y0: mpf, yp0: mpf, n: int):
    # y'' = z y about z0: (k+2)(k+1) c[k+2] = z0 c[k] + c[k-1]
    c = [y0, yp0]
    for k in range(n - 2):
        prev = c[k - 1] if k >= 1 else 0
        c.append((z0 * c[k] + prev) / ((k + 2) * (k + 1)))
    return c[:n]


def level_taylor(j0, order: int, dps: int = 30):
    """Taylor coefficients ``[u(j0), u'(j0), u''(j0)/2!, ...]`` up to ``order``.

    Built from the Airy ODE: the Taylor series of ``dj/du = 1/(pi^2 M^2)`` is
    integrated and reverted, giving ``u(j0 + s)`` as a power series in ``s``.
    """
    n = order + 1
    with mpmath.workdps(dps + GUARD_DIGITS):
        u0 = level_position(j0, dps)
        ai, aip, bi, bip = airy_ai_bi(-u0, dps + GUARD_DIGITS)
        # Ai(-u0 - h): substitute t = -h in the Taylor series about z0 = -u0
        A = [(-1) ** k * c for k, c in enumerate(_airy_taylor(-u0, ai, aip, n))]
        B = [(-1) ** k * c for k, c in enumerate(_airy_taylor(-u0, bi, bip, n))]
        m2 = [x + y for x, y in zip(_series_mul(A, A, n), _series_mul(B, B, n))]
        djdu = [v / mpmath.pi ** 2 for v in _series_recip(m2, n)]
        p = [mpf(0)] + [djdu[k - 1] / k for k in range(1, n)]   # j(u0+h) - j0
        # reversion of s = sum p_m h^m: h = sum b_n s^n
        b = [mpf(0)] * n
        powers = {1: [mpf(0)] * n}
        if n > 1:
            b[1] = 1 / p[1]
            powers[1][1] = b[1]
        for k in range(2, n):
            for m in range(2, k + 1):
                row = powers.setdefault(m, [mpf(0)] * n)
                prev = powers[m - 1]
                row[k] = mpmath.fsum(b[i] * prev[k - i] for i in range(1, k - m + 2))
            b[k] = -mpmath.fsum(p[m] * powers[m][k] for m in range(2, k + 1)) / p[1]
            powers[1][k] = b[k]
        b[0] = u0
        return [+v for v in b]


def level_integral(ja, jb, dps: int = 30) -> mpf:
    """``int_{ja}^{jb} u(j) dj`` via ``int u / (pi^2 M^2(-u)) du``."""
    with mpmath.workdps(dps + GUARD_DIGITS):
        ua, ub = level_position(ja, dps), level_position(jb, dps)

        def integrand(u):
            ai, _, bi, _ = airy_ai_bi(-u, dps + GUARD_DIGITS)
            return u / (mpmath.pi ** 2 * (ai * ai + bi * bi))

        return +mpmath.quad(integrand, [ua, ub])
