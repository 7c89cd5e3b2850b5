from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bethewronski import polynomial_core as pc
from bethewronski import slp_extension as se
from bethewronski import sweeps
from bethewronski import wronski_map as wm
from bethewronski.bethe_sl2 import SolverConfig, bethe_residual, generic_points, master_value
from bethewronski.schubert import slp_upper_bound
from bethewronski.sl2_rep import WeightDatum, dim_sing_formula, dim_sing_kernel
from bethewronski.wronski_map import PolyPlane

X = pc.x_poly()
HALF = Fraction(1, 2)


def test_master_value_example():
    p = se.SlpProblem(3, (1, 1), (0, 1), (1, 1))
    assert se.slp_master_value(p, ((2,), (3,))) == Fraction(-1, 2)


def test_master_value_reduces_to_sl2():
    p = se.SlpProblem(3, (1, 1, 2), (0, 1, -1), (2, 0))
    t = ((Fraction(1, 3), Fraction(5, 2)), ())
    assert se.slp_master_value(p, t) == master_value(p.sl2(), t[0])


def _random_levels(rng, p):
    return tuple(tuple(rng.uniform(-2, 2, kl) + 1j * rng.uniform(-2, 2, kl)) for kl in p.k)


def test_master_value_discres_agreement():
    rng = np.random.default_rng(11)
    p = se.SlpProblem(3, (1, 2, 1), generic_points(3, rng), (2, 1))
    for _ in range(20):
        t = _random_levels(rng, p)
        a, b = se.slp_master_value(p, t), se.slp_master_value_discres(p, t)
        assert abs(a - b) <= 1e-10 * abs(a)


def test_on_diagonal_rejected():
    p = se.SlpProblem(3, (1, 1), (0, 1), (1, 1))
    with pytest.raises(ValueError):
        se.slp_master_value(p, ((2,), (2,)))


def test_residual_reduces_to_sl2():
    rng = np.random.default_rng(3)
    p = se.SlpProblem(4, (2, 1, 1), generic_points(3, rng), (2, 0, 0))
    t = _random_levels(rng, p)
    got = se.slp_residual(p, t)
    assert np.allclose(got[0], bethe_residual(p.sl2(), t[0]), rtol=0, atol=1e-13)
    assert all(len(lv) == 0 for lv in got[1:])


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_residual_matches_contour_gradient(seed):
    rng = np.random.default_rng(seed)
    p = se.SlpProblem(3, (1, 2, 1), generic_points(3, rng), (2, 1))
    t = _random_levels(rng, p)
    pts = [x for lv in t for x in lv] + [complex(z) for z in p.z]
    if min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]) < 0.05:
        return
    res = se.slp_residual(p, t)
    grad = se.slp_log_gradient_contour(p, t)
    scale = sum(np.abs(np.asarray(lv)).sum() for lv in res) + 1
    assert all(np.abs(np.asarray(r) + np.asarray(g)).max(initial=0) <= 1e-8 * scale for r, g in zip(res, grad))


def test_no_solutions_when_block_vanishes():
    p = se.SlpProblem(3, (1, 1), (0, 1), (1, 1))
    assert se.slp_dim_sing(p) == 0
    res = se.solve_slp(p, SolverConfig(seed=1, max_starts=64), expected=0)
    assert res.orbits == []


def test_wr_tower_examples():
    V = PolyPlane.span([X**2, X, pc.Poly.constant(1)])
    tower = se.wr_tower(V)
    assert tower.levels == (pc.Poly.constant(1),) * 3
    assert V.type == (2, 1, 0)
    assert se.degree_law(V.type) == (0, 0, 0)
    assert tower.nondegenerate


def test_wr_tower_p2_matches_wronski_map():
    V = PolyPlane.span([X - pc.Poly.constant(HALF), X**2 - X + pc.Poly.constant(HALF)])
    tower = se.wr_tower(V)
    assert tower.levels == (wm.plane_wronskian(V), V.smallest())


@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_degree_law(p, seed):
    rng = np.random.default_rng(seed)
    V = sweeps.random_exact_plane(rng, p, int(rng.integers(p - 1, 9)))
    assert se.wr_tower(V).degrees == se.degree_law(V.type)


def test_three_point_sl3_orbits_and_planes():
    p = se.SlpProblem(3, (1, 1, 1), (0, 1, 3), (1, 0))
    assert se.slp_dim_sing(p) == 2
    res = se.solve_slp(p, SolverConfig(seed=2), expected=2)
    assert res.agree
    planes = []
    for o in res.orbits:
        V, back, dist = se.slp_orbit_plane_roundtrip(p, o)
        assert dist < 1e-6
        assert pc.rel_distance(se.wr_tower(V).levels[0], p.wronskian_target(pc.COMPLEX)) < 1e-8
        planes.append(V)
    assert wm.plane_distance(*planes) > 1e-3


def test_p2_roundtrip_matches_sl2_plane():
    p = se.SlpProblem(2, (1, 1), (0, 1), (1,))
    orbit = se.make_slp_orbit(p, ((0.5,),))
    V = se.plane_from_slp_orbit(p, orbit)
    assert wm.plane_distance(V, wm.plane_from_orbit(p.sl2(), wm.orbit_from_plane(V, p.sl2()))) < 1e-12


def test_dim_sing_examples():
    assert se.slp_dim_sing(se.SlpProblem(3, (1, 1), (0, 1), (1, 0))) == 1
    assert se.slp_dim_sing(se.SlpProblem(3, (1, 1), (0, 1), (1, 1))) == 0
    assert se.slp_dim_sing(se.SlpProblem(3, (1, 1, 1), (0, 1, 2), (1, 0))) == 2
    assert slp_upper_bound((1, 1, 1), (1, 0), p=3) == 2


@given(st.lists(st.integers(1, 3), min_size=2, max_size=4), st.integers(0, 6))
def test_dim_sing_p2_reduction(M, k):
    if 2 * k > sum(M):
        return
    z = tuple(range(len(M)))
    assert se.slp_dim_sing(se.SlpProblem(2, tuple(M), z, (k,))) == dim_sing_formula(WeightDatum(tuple(M), k)) == dim_sing_kernel(WeightDatum(tuple(M), k))


def test_block_cap():
    with pytest.raises(se.BlockTooLarge):
        se.slp_dim_sing(se.SlpProblem(3, (3, 3, 3, 3), (0, 1, 2, 3), (2, 1)), cap=10)


def test_fuchsian_p2_example():
    V = PolyPlane.span([X - pc.Poly.constant(HALF), X**2 - X + pc.Poly.constant(HALF)])
    form = se.fuchsian_reduce(V)
    assert (form.A, form.B, form.C) == (-2, 1, 2)
    xx1 = pc.Poly((0, -1, 1))
    assert form.coefficients[2] == xx1
    for b in V.basis:
        assert sum((c * b.derivative(r) for r, c in enumerate(form.coefficients)), pc.Poly.zero()).is_zero()
    assert se.exponents(form, 0) == [0, 2]
    assert se.exponents(form, 1) == [0, 2]


@pytest.mark.parametrize("p,m1,m2,k1", [(3, 1, 1, 1), (3, 2, 1, 1), (4, 2, 2, 1), (3, 3, 2, 2)])
def test_fuchsian_instances(p, m1, m2, k1):
    V = se.fuchsian_instance(p, m1, m2, k1)
    assert V is not None
    assert wm.plane_wronskian(V) == pc.Poly((0, 1)) ** m1 * pc.Poly((-1, 1)) ** m2
    form = se.fuchsian_reduce(V)
    assert all(c.is_zero() for c in form.coefficients[:p - 2])
    for b in V.basis:
        assert sum((c * b.derivative(r) for r, c in enumerate(form.coefficients)), pc.Poly.zero()).is_zero()
    assert se.exponents(form, 0) == list(range(p - 1)) + [m1 + p - 1]
    assert se.exponents(form, 1) == list(range(p - 1)) + [m2 + p - 1]


def test_fuchsian_rejects_non_exact_and_wrong_shape():
    V = PolyPlane.span([X.as_complex(), pc.Poly.constant(1).as_complex()])
    with pytest.raises(se.ReductionFailed):
        se.fuchsian_reduce(V)
    # Wronskian 3(x - 1)(x + 1): a singular point away from {0, 1}
    wrong_points = PolyPlane.span([X**3 - X.scale(3), pc.Poly.constant(1)])
    with pytest.raises(se.ReductionFailed):
        se.fuchsian_reduce(wrong_points)
