import math

import numpy as np
import pytest

from semisum import (NotSupportedError, PotentialSpec, UnboundLevelError, action_integral,
                     closed_form_eigenvalue, pt_wkb_closed_form, quantize)
from semisum.wkb import curvature_integral, period_integral, pt_wkb_shift


def test_action_closed_forms():
    assert action_integral(PotentialSpec("harmonic", {"w": 1}), 0.5) == pytest.approx(
        math.pi / 2, rel=1e-14)
    D = 10.0
    for eps in (-9.5, -3.0, -0.01):
        assert action_integral(PotentialSpec("poschl_teller", {"D": D}), eps) == pytest.approx(
            math.pi * (math.sqrt(2 * D) - math.sqrt(-2 * eps)), rel=1e-13)
    for eps in (0.3, 5.0, 77.0):
        assert action_integral(PotentialSpec("linear_half_well"), eps) == pytest.approx(
            2 * math.sqrt(2) / 3 * eps ** 1.5, rel=1e-13)


def test_period_integral_harmonic():
    # T/2 = pi / w, independent of energy
    for eps in (0.5, 10.0):
        assert period_integral(PotentialSpec("harmonic", {"w": 2.0}), eps) == pytest.approx(
            math.pi / 2.0, rel=1e-12)


def test_curvature_integral_vanishes_for_box_and_is_finite_elsewhere():
    assert curvature_integral(PotentialSpec("box", {"L": 1}), 3.0) == 0.0
    assert math.isfinite(curvature_integral(PotentialSpec("poschl_teller", {"D": 10}), -2.0))


@pytest.mark.parametrize("spec", [PotentialSpec("box", {"L": 1.0}),
                                  PotentialSpec("box", {"L": 3.7}),
                                  PotentialSpec("harmonic", {"w": 1.0}),
                                  PotentialSpec("harmonic", {"w": 0.3})], ids=repr)
def test_exact_for_box_and_harmonic(spec):
    for j in range(51):
        exact = closed_form_eigenvalue(spec, j)
        assert abs(quantize(spec, j).eps0 - exact) <= 1e-12 * abs(exact)


def test_pt_examples():
    spec = PotentialSpec("poschl_teller", {"D": 10})
    lam0 = math.sqrt(20) - 0.5
    assert quantize(spec, 0).eps0 == pytest.approx(-lam0 ** 2 / 2, abs=1e-12)
    assert pt_wkb_closed_form(10, 0) == pytest.approx(-7.8889320225, abs=1e-10)
    assert pt_wkb_closed_form(10, 3) == pytest.approx(-0.4725241575, abs=1e-10)
    assert abs(pt_wkb_closed_form(10, 0) + 8) == pytest.approx(0.111, abs=1e-3)
    with pytest.raises(UnboundLevelError):
        pt_wkb_closed_form(10, 4)


@pytest.mark.parametrize("D", [10.0, 100.0])
def test_pt_numeric_matches_closed_form(D):
    spec = PotentialSpec("poschl_teller", {"D": D})
    lam0 = math.sqrt(2 * D) - 0.5
    for j in range(int(math.floor(lam0)) + 1):
        assert quantize(spec, j).eps0 == pytest.approx(pt_wkb_closed_form(D, j), abs=1e-10)


def test_pt_relative_error_shrinks_with_depth():
    errs = []
    for D in (10.0, 100.0, 1000.0, 10000.0):
        spec = PotentialSpec("poschl_teller", {"D": D})
        j = round(0.1 * (math.sqrt(2 * D + 0.25) - 0.5))
        exact = closed_form_eigenvalue(spec, j)
        errs.append(abs(quantize(spec, j).eps0 - exact) / abs(exact))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_eps2_pt_example():
    s = quantize(PotentialSpec("poschl_teller", {"D": 10}), 0, order=2)
    assert s.eps2 == pytest.approx(-0.1110266, rel=0.05)
    assert s.total == s.eps0 + s.eps2


@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_eps2_pt_deep_well(j):
    spec = PotentialSpec("poschl_teller", {"D": 100})
    assert quantize(spec, j, 2).eps2 == pytest.approx(pt_wkb_shift(100, j), rel=0.05)


def test_order2_improves_pt_levels():
    spec = PotentialSpec("poschl_teller", {"D": 100})
    for j in range(5):
        s = quantize(spec, j, 2)
        exact = closed_form_eigenvalue(spec, j)
        assert abs(s.total - exact) < abs(s.eps0 - exact)


def test_eps2_vanishes_for_harmonic_and_box():
    for j in (0, 3, 10):
        assert abs(quantize(PotentialSpec("harmonic", {"w": 1}), j, 2).eps2) < 1e-9
    assert quantize(PotentialSpec("box", {"L": 1}), 2, 2).eps2 == 0.0


def test_order2_unsupported_with_wall():
    with pytest.raises(NotSupportedError):
        quantize(PotentialSpec("linear_half_well"), 0, 2)


def test_bad_order_and_unbound():
    with pytest.raises(ValueError):
        quantize(PotentialSpec("harmonic", {"w": 1}), 0, 1)
    with pytest.raises(UnboundLevelError):
        quantize(PotentialSpec("poschl_teller", {"D": 10}), 5)


def test_non_integer_index_interpolates():
    spec = PotentialSpec("poschl_teller", {"D": 10})
    for j in np.linspace(-0.4, 3.9, 9):
        assert quantize(spec, j).eps0 == pytest.approx(pt_wkb_closed_form(10, j), abs=1e-11)
