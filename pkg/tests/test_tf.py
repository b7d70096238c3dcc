import math

import numpy as np
import pytest

from semisum import (DensityProfile, NormalizationError, PotentialSpec, gea_kinetic, sp_density,
                     sp_kinetic_density, tf_kinetic, tf_scf, tf_total_energy, vw_kinetic)
from semisum.tf import (CosineCell, cosine_cell_bands, gea_study, integrate,
                        tf_chemical_potential, tf_energy_parts, tf_particle_count)

SQ20 = math.sqrt(20.0)


def uniform(n0, length, points=1001):
    x = np.linspace(0.0, length, points)
    return DensityProfile(x, np.full_like(x, n0), n0 * length)


def gaussian(N, half_width=12.0, points=4001):
    x = np.linspace(-half_width, half_width, points)
    return DensityProfile(x, N * np.exp(-x ** 2) / math.sqrt(math.pi), N)


def test_integrate_polynomial_exact():
    x = np.linspace(0.0, 2.0, 101)
    assert integrate(x, x ** 3) == pytest.approx(4.0, rel=1e-13)


def test_profile_validation():
    x = np.linspace(0, 1, 11)
    with pytest.raises(NormalizationError):
        DensityProfile(x, np.ones(11), 2.0)
    with pytest.raises(ValueError):
        DensityProfile(x, -np.ones(11), -1.0)
    with pytest.raises(ValueError):
        DensityProfile(x[::-1], np.ones(11), 1.0)


def test_tf_kinetic_examples():
    assert tf_kinetic(uniform(1.0, math.pi)) == pytest.approx(math.pi ** 3 / 6, rel=1e-13)
    x = np.linspace(0, 1, 11)
    assert tf_kinetic(DensityProfile(x, np.zeros(11), 0.0)) == 0.0


def test_vw_examples():
    assert abs(vw_kinetic(uniform(0.7, 2.0))) < 1e-20
    assert vw_kinetic(gaussian(3.0)) == pytest.approx(3.0 / 4.0, rel=1e-6)
    x = np.linspace(-1, 1, 2001)
    n = np.cos(math.pi * x / 2) ** 2 + 1e-3
    value = vw_kinetic(DensityProfile(x, n, integrate(x, n)))
    assert 0 < value < math.inf


def test_vw_reports_excluded_points():
    x = np.linspace(-20, 20, 4001)
    n = np.exp(-x ** 2)
    value, diag = vw_kinetic(DensityProfile(x, n, integrate(x, n)), full_output=True)
    assert diag.excluded_points > 0
    assert 0 <= diag.excluded_mass < 1e-10
    assert value == pytest.approx(math.sqrt(math.pi) / 4, rel=1e-6)


def test_gea_sign():
    u = uniform(1.3, 2.0)
    assert gea_kinetic(u) == tf_kinetic(u)
    g = gaussian(2.0)
    assert gea_kinetic(g) < tf_kinetic(g)


def test_sp_examples():
    flat = PotentialSpec("box", {"L": 1.0})
    assert sp_density(flat, 0.5, 0.5) == pytest.approx(1 / math.pi, rel=1e-15)
    assert sp_kinetic_density(flat, 0.5, 0.5) == pytest.approx(1 / (6 * math.pi), rel=1e-15)
    harm = PotentialSpec("harmonic", {"w": 1.0})
    assert sp_density(harm, 2.0, 0.0) == pytest.approx(2 / math.pi * (1 + 1 / 192), rel=1e-15)
    assert sp_kinetic_density(harm, 2.0, 0.0) == pytest.approx(
        8 / (2 * math.pi) * (1 / 3 + 1 / 64), rel=1e-15)
    assert sp_density(harm, 2.0, 3.0) == 0.0


def test_sp_divergence_flag_near_turning_point():
    harm = PotentialSpec("harmonic", {"w": 1.0})
    x = np.array([0.0, 1.99, 2.5])
    values, flags = sp_density(harm, 2.0, x, full_output=True)
    assert flags.tolist() == [False, True, False]
    assert values[2] == 0.0


def test_sp_order0_integrates_to_tf_count():
    spec = PotentialSpec("poschl_teller", {"D": 10.0})
    mu = tf_chemical_potential(spec, 4)
    xt = math.acosh(math.sqrt(10 / -mu))
    x = np.linspace(-xt, xt, 200001)
    p = np.sqrt(np.maximum(2 * (mu - spec.value(x)), 0))
    assert integrate(x, p / math.pi) == pytest.approx(4.0, rel=1e-6)
    assert tf_particle_count(spec, mu) == pytest.approx(4.0, rel=1e-12)


def test_tf_chemical_potentials():
    pt = PotentialSpec("poschl_teller", {"D": 10.0})
    assert tf_chemical_potential(pt, 4) == pytest.approx(-(SQ20 - 4) ** 2 / 2, rel=1e-12)
    assert tf_chemical_potential(PotentialSpec("harmonic", {"w": 1}), 2) == pytest.approx(2.0)
    L, N = 1.5, 3
    assert tf_chemical_potential(PotentialSpec("box", {"L": L}), N) == pytest.approx(
        math.pi ** 2 * N ** 2 / (2 * L ** 2))


def test_tf_scf_profile():
    pt = PotentialSpec("poschl_teller", {"D": 10.0})
    n = tf_scf(pt, 4)
    assert n.mu == pytest.approx(-0.1114562, abs=1e-6)
    assert n.integrate(n.values) == pytest.approx(4.0, rel=1e-10)
    box = tf_scf(PotentialSpec("box", {"L": 2.0}), 3, points=1001)
    assert np.allclose(box.values, 1.5)


def test_tf_scf_unattainable():
    with pytest.raises(NormalizationError):
        tf_scf(PotentialSpec("poschl_teller", {"D": 10.0}), 5)


def test_tf_energy_examples():
    pt = PotentialSpec("poschl_teller", {"D": 10.0})
    e = tf_total_energy(pt, 4)
    assert e == pytest.approx(-(SQ20 ** 3 - (SQ20 - 4) ** 3) / 6, abs=1e-6)
    assert e == pytest.approx(-14.8895790, abs=1e-6)
    assert -15.0 - e == pytest.approx(-0.1104, abs=1e-4)
    assert tf_total_energy(PotentialSpec("box", {"L": 1.0}), 2) == pytest.approx(
        4 * math.pi ** 2 / 3, rel=1e-12)
    parts = tf_energy_parts(pt, 4)
    assert parts.total == pytest.approx(parts.kinetic + parts.potential)


def test_tf_energy_matches_scf_profile():
    pt = PotentialSpec("poschl_teller", {"D": 10.0})
    n = tf_scf(pt, 4)
    grid_energy = tf_kinetic(n) + n.integrate(n.values * pt.value(n.grid))
    assert grid_energy == pytest.approx(tf_total_energy(pt, 4), rel=1e-6)


def test_grid_refinement_invariance():
    pt = PotentialSpec("poschl_teller", {"D": 10.0})
    coarse, fine = tf_scf(pt, 4, points=20001), tf_scf(pt, 4, points=40001)
    # the density has a square-root edge, so the grid mu converges, slowly, to the exact one
    exact = tf_chemical_potential(pt, 4)
    assert abs(fine.mu - exact) < abs(coarse.mu - exact) < 1e-5 * abs(exact)
    x = np.linspace(-8, 8, 4001)
    xf = np.linspace(-8, 8, 8001)
    g = lambda x: 2.0 * np.exp(-x ** 2) / math.sqrt(math.pi)  # noqa: E731
    a = DensityProfile(x, g(x), 2.0)
    b = DensityProfile(xf, g(xf), 2.0)
    for fn in (tf_kinetic, vw_kinetic, gea_kinetic):
        assert fn(b) == pytest.approx(fn(a), rel=1e-8)


def test_cosine_cell_uniform_limit():
    # eta = 0: free particles, so the density is flat and the kinetic energy is the TF one
    res = cosine_cell_bands(CosineCell(0.0, 10.0), 3)
    n = res.density
    assert n.integrate(n.values) == pytest.approx(3.0, rel=1e-9)
    assert np.allclose(n.values, 0.3, rtol=1e-8)
    assert res.kinetic == pytest.approx(tf_kinetic(n), rel=1e-6)


def test_gea_ratio_below_one_and_decreasing():
    rows = gea_study((0.5, 0.2, 0.05), 5, 10.0)
    ratios = [r.ratio for r in rows]
    assert all(r < 1 for r in ratios)
    assert ratios[0] > ratios[1] > ratios[2]
    for r in rows:
        assert r.t_gea == pytest.approx(r.t_tf - r.t_vw / 3)
