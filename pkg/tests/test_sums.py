import math

import mpmath
import pytest

from semisum import (AsymptoticSeries, EnergyBreakdown, NotSupportedError, PotentialSpec,
                     UnboundLevelError, breakdown, delta_2a, delta_2b, euler_maclaurin_sum,
                     exact_sum, integral_sum, linear_well_series, optimal_truncate,
                     tf_total_energy)
from semisum.oracle import airy_zero_sum
from semisum.sums import finite_derivative, wkb0_level_function, wkb0_sum

SQ20 = math.sqrt(20.0)
LAM0 = SQ20 - 0.5


def test_integral_sum_examples(pt10):
    assert integral_sum(pt10, 4, "endpoint") == pytest.approx(
        -(LAM0 ** 3 - (LAM0 - 3) ** 3) / 6, abs=1e-10)
    assert integral_sum(pt10, 4, "endpoint") == pytest.approx(-10.2921840, abs=1e-6)
    assert integral_sum(pt10, 4, "midpoint") == pytest.approx(
        -(SQ20 ** 3 - (SQ20 - 4) ** 3) / 6, abs=1e-10)
    assert integral_sum(PotentialSpec("harmonic", {"w": 1}), 1, "endpoint") == 0.0


def test_integral_sum_rejects_unbound(pt10):
    with pytest.raises(UnboundLevelError):
        integral_sum(pt10, 6)
    with pytest.raises(ValueError):
        integral_sum(pt10, 2, "leftpoint")


def test_delta_2a(pt10):
    analytic = -(3 * LAM0 - 4.5) / (8 * SQ20)
    assert delta_2a(pt10, 4) == pytest.approx(analytic, abs=1e-4)
    discrete = -(4 * LAM0 - 6) / (8 * SQ20)
    assert delta_2a(pt10, 4, discrete=True) == pytest.approx(discrete, abs=1e-3)
    assert delta_2a(PotentialSpec("box", {"L": 2.0}), 7) == 0.0
    assert abs(delta_2a(PotentialSpec("harmonic", {"w": 1}), 5)) < 1e-9


def test_delta_2a_unsupported_for_wall(linwell):
    with pytest.raises(NotSupportedError):
        delta_2a(linwell, 4)


def test_delta_2b(pt10):
    assert delta_2b(pt10, 4) == pytest.approx(-4.1807280900, abs=1e-9)
    assert delta_2b(PotentialSpec("harmonic", {"w": 1}), 1) == pytest.approx(0.5, abs=1e-14)


def test_em_endpoint_quadratic_pt(pt10):
    b = euler_maclaurin_sum(wkb0_level_function(pt10), 4, 2, "endpoint")
    assert b.em_higher[0] == pytest.approx(-0.25, abs=1e-10)
    direct = math.fsum(-(LAM0 - j) ** 2 / 2 for j in range(4))
    assert b.total == pytest.approx(direct, abs=1e-10)
    assert b.total == pytest.approx(-14.7229121, abs=1e-6)


def test_em_midpoint_quadratic_pt(pt10):
    b = euler_maclaurin_sum(wkb0_level_function(pt10), 4, 2, "midpoint")
    assert b.em_higher[0] == pytest.approx(1 / 6, abs=1e-10)
    assert b.total == pytest.approx(wkb0_sum(pt10, 4), abs=1e-10)


def test_em_generic_callable():
    b = euler_maclaurin_sum(lambda j: math.exp(-0.3 * j), 12, 4, "endpoint")
    direct = math.fsum(math.exp(-0.3 * j) for j in range(12))
    assert b.total == pytest.approx(direct, abs=1e-6)
    b0 = euler_maclaurin_sum(lambda j: math.exp(-0.3 * j), 12, 0, "endpoint")
    assert abs(b.total - direct) < abs(b0.total - direct)


@pytest.mark.parametrize("order", [0, 2, 4])
@pytest.mark.parametrize("convention", ["endpoint", "midpoint"])
def test_em_constant_function(order, convention):
    assert euler_maclaurin_sum(lambda j: 2.5, 7, order, convention).total == pytest.approx(
        17.5, abs=1e-12)


def test_em_order_limits():
    with pytest.raises(NotSupportedError):
        euler_maclaurin_sum(lambda j: j, 3, 6)
    with pytest.raises(ValueError):
        euler_maclaurin_sum(lambda j: j, 3, 3)


def test_trapezoid_improves_riemann():
    f = lambda j: math.sqrt(1.0 + j)  # noqa: E731
    for N in (10, 40):
        direct = math.fsum(f(j) for j in range(N))
        b = euler_maclaurin_sum(f, N, 0, "endpoint")
        assert abs(b.e0 + b.d2b - direct) < abs(b.e0 - direct) / 10


def test_finite_derivative():
    assert finite_derivative(math.sin, 0.4, 1, 1e-3) == pytest.approx(math.cos(0.4), rel=1e-10)
    assert finite_derivative(math.sin, 0.4, 3, 5e-2) == pytest.approx(-math.cos(0.4),
                                                                           rel=1e-6)
    assert finite_derivative(math.exp, 0.001, 1, 1e-3, lower=0.0) == pytest.approx(
        math.exp(0.001), rel=1e-9)


def test_breakdown_pt_discrete(pt10):
    b = breakdown(pt10, 4, "endpoint", 2, discrete_eps2=True)
    assert b.exact == -15.0
    assert abs(b.total + 15) < 1e-3
    assert b.total == pytest.approx(-14.9993, abs=1e-4)
    assert abs(b.error) == pytest.approx(7e-4, abs=1e-4)


def test_breakdown_pt_integral_in_band(pt10):
    b = breakdown(pt10, 4)
    assert -15.0 <= b.total <= -14.93
    assert b.d2a_mode == "integral"


def test_breakdown_box_exact():
    b = breakdown(PotentialSpec("box", {"L": 1.0}), 5)
    assert abs(b.error) < 1e-10


def test_breakdown_assembly_identity(pt10):
    b = breakdown(pt10, 4, "midpoint", 4, discrete_eps2=True)
    total = b.e0
    for part in (b.d2a, b.d2b, *b.em_higher):
        total += part
    assert b.total == total
    with pytest.raises(ValueError):
        EnergyBreakdown(4, "endpoint", 1.0, 0.0, 0.0, (), total=2.0)


def test_linwell_breakdown_within_tenth_hartree(linwell):
    errs = [abs(breakdown(linwell, 10, "midpoint", order).error) for order in (0, 2, 4)]
    assert errs[0] < 0.1
    assert errs[0] > errs[1] > errs[2]


def test_linwell_midpoint_order0_in_airy_units(linwell):
    # the same breakdown measured against sum |a_k| (a factor 2**(1/3) larger)
    b = breakdown(linwell, 10, "midpoint", 0)
    scale = 2 ** (1 / 3)
    assert abs(b.total * scale - float(airy_zero_sum(10))) == pytest.approx(
        abs(b.error) * scale, rel=1e-12)


def test_midpoint_integral_is_tf_energy():
    for D in (10.0, 100.0):
        spec = PotentialSpec("poschl_teller", {"D": D})
        N = math.floor(math.sqrt(2 * D + 0.25) - 0.5)
        a, b = integral_sum(spec, N, "midpoint"), tf_total_energy(spec, N)
        assert abs(a - b) <= 1e-8 * abs(b)


def test_ls_trend_both_conventions():
    for conv in ("endpoint", "midpoint"):
        rel = []
        for D in (10.0, 100.0, 1000.0):
            spec = PotentialSpec("poschl_teller", {"D": D})
            N = math.floor(math.sqrt(2 * D + 0.25) - 0.5)
            ex = exact_sum(spec, N)
            rel.append(abs(integral_sum(spec, N, conv) - ex) / abs(ex))
        assert rel[0] > rel[1] > rel[2]


def test_optimal_truncate_examples():
    s = AsymptoticSeries((1, -0.1, 0.02, -0.015, 0.3))
    value, m = optimal_truncate(s)
    assert m == 4 and value == pytest.approx(0.905)
    s = AsymptoticSeries(tuple(0.5 ** k for k in range(8)))
    assert optimal_truncate(s)[1] == 8
    assert optimal_truncate(AsymptoticSeries((1.0, 0.1, 0.1)))[1] == 2
    with pytest.raises(ValueError):
        optimal_truncate(AsymptoticSeries((1.0,)))


def test_linear_well_series_smallest_term():
    series = linear_well_series()
    with mpmath.workdps(40):
        ref = airy_zero_sum(10) / mpmath.cbrt(2)
        value, m = optimal_truncate(series)
        errs = [abs(series.partial_sum(k) - ref) for k in range(1, len(series.terms) + 1)]
        best_err = abs(value - ref)
        assert best_err < mpmath.mpf(10) ** -6 * ref
        assert all(best_err < e for e in errs[:m - 1])
        empirical = min(range(len(errs)), key=errs.__getitem__) + 1
        assert abs(empirical - m) <= 2
        # beats truncation right after the B2 term
        assert best_err < errs[2]
