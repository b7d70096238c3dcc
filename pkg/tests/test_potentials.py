import math
from fractions import Fraction

import numpy as np
import pytest

from semisum import (DomainError, NoAllowedRegionError, PotentialSpec, UnboundLevelError,
                     UsageError, classical_momentum, derivatives, evaluate, maslov_index,
                     parse_potential, turning_points)
from semisum.oracle import bound_state_count, pt_lambda


@pytest.mark.parametrize("text,kind,params", [
    ("pt:D=10", "poschl_teller", {"D": 10.0}),
    ("box:L=2.5", "box", {"L": 2.5}),
    ("harm:w=1e-1", "harmonic", {"w": 0.1}),
    ("linwell", "linear_half_well", {}),
    ("quartic:a=1,b=-4", "quartic", {"a": 1.0, "b": -4.0}),
    ("quartic:a=2", "quartic", {"a": 2.0, "b": 0.0}),
])
def test_parse(text, kind, params):
    spec = parse_potential(text)
    assert spec == PotentialSpec(kind, params)
    assert PotentialSpec.parse(text) == spec


@pytest.mark.parametrize("text", ["pt:D=", "pt:", "pt:D=ten", "blob:x=1", "pt:D=-1",
                                  "box:L=0", "pt:E=3", "harm"])
def test_parse_errors_name_the_input(text):
    with pytest.raises(UsageError) as info:
        parse_potential(text)
    assert text.split(":")[0] in str(info.value)


def test_malformed_token_is_named():
    with pytest.raises(UsageError, match="pt:D="):
        parse_potential("pt:D=")


def test_values():
    assert evaluate(PotentialSpec("poschl_teller", {"D": 10}), 0.0) == -10.0
    assert evaluate(PotentialSpec("harmonic", {"w": 2}), 1.5) == pytest.approx(0.5 * 4 * 2.25)
    assert evaluate(PotentialSpec("linear_half_well"), 3.0) == 3.0
    assert evaluate(PotentialSpec("quartic", {"a": 1, "b": -4}), 1.0) == -3.0
    assert evaluate(PotentialSpec("box", {"L": 1}), 0.3) == 0.0
    x = np.array([0.1, 0.5])
    assert evaluate(PotentialSpec("box", {"L": 1}), x).shape == (2,)


def test_domain_errors():
    with pytest.raises(DomainError):
        evaluate(PotentialSpec("box", {"L": 1}), 1.5)
    with pytest.raises(DomainError):
        evaluate(PotentialSpec("linear_half_well"), -0.1)


def test_derivatives_match_finite_differences():
    spec = PotentialSpec("poschl_teller", {"D": 3.0})
    x, h = 0.37, 1e-4
    d1 = (evaluate(spec, x + h) - evaluate(spec, x - h)) / (2 * h)
    d2 = (evaluate(spec, x + h) - 2 * evaluate(spec, x) + evaluate(spec, x - h)) / h ** 2
    assert derivatives(spec, x, 1) == pytest.approx(d1, rel=1e-7)
    assert derivatives(spec, x, 2) == pytest.approx(d2, rel=1e-5)


def test_momentum_zero_in_forbidden_region():
    spec = PotentialSpec("harmonic", {"w": 1.0})
    p = classical_momentum(spec, 0.5, np.array([0.0, 2.0]))
    assert p[0] == pytest.approx(1.0)
    assert p[1] == 0.0


def test_turning_points_harmonic_and_pt():
    tp = turning_points(PotentialSpec("harmonic", {"w": 1.0}), 0.5)
    assert tp.region == pytest.approx((-1.0, 1.0), rel=1e-15)
    D, eps = 10.0, -3.0
    x = math.acosh(math.sqrt(D / -eps))
    tp = turning_points(PotentialSpec("poschl_teller", {"D": D}), eps)
    assert tp.region == pytest.approx((-x, x), rel=1e-14)


def test_turning_points_walls_and_double_well():
    tp = turning_points(PotentialSpec("box", {"L": 2.0}), 1.0)
    assert tp.walls == (0.0, 2.0) and tp.points == ()
    assert tp.intervals[0].lo_kind == "wall"
    tp = turning_points(PotentialSpec("linear_half_well"), 2.0)
    assert tp.region == (0.0, 2.0)
    tp = turning_points(PotentialSpec("quartic", {"a": 1.0, "b": -4.0}), -1.0)
    assert len(tp.intervals) == 2
    assert len(tp.points) == 4


def test_turning_point_errors():
    with pytest.raises(NoAllowedRegionError):
        turning_points(PotentialSpec("poschl_teller", {"D": 10}), -11.0)
    with pytest.raises(UnboundLevelError):
        turning_points(PotentialSpec("poschl_teller", {"D": 10}), 0.5)


def test_maslov_indices():
    assert maslov_index(PotentialSpec("box", {"L": 1})) == Fraction(1)
    assert maslov_index(PotentialSpec("harmonic", {"w": 1})) == Fraction(1, 2)
    assert maslov_index(PotentialSpec("poschl_teller", {"D": 1})) == Fraction(1, 2)
    assert maslov_index(PotentialSpec("linear_half_well")) == Fraction(3, 4)


@pytest.mark.parametrize("D", [1.0, 10.0, 100.0, 1000.0])
def test_pt_bound_count_law(D):
    lam = math.sqrt(2 * D + 0.25) - 0.5
    assert pt_lambda(D) == pytest.approx(lam)
    assert bound_state_count(PotentialSpec("poschl_teller", {"D": D})) == math.floor(lam) + 1


def test_spec_immutable_and_hashable():
    spec = PotentialSpec("poschl_teller", {"D": 10})
    with pytest.raises(TypeError):
        spec.params["D"] = 3.0
    assert {spec: 1}[PotentialSpec("poschl_teller", {"D": 10.0})] == 1
