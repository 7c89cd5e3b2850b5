import math
import warnings
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bethewronski import bethe_sl2 as bs
from bethewronski.bethe_sl2 import BetheOrbit, MasterProblem, SolverConfig
from bethewronski.errors import OnDiagonal
from bethewronski.gaudin import build_hamiltonians, eigen_residual, highest_eigenvalues
from bethewronski.sl2_rep import act, basis_indices, shapovalov

HALF = Fraction(1, 2)
TWO_POINT = MasterProblem((1, 1), (0, 1), 1)


def test_master_value_examples():
    assert bs.master_value(TWO_POINT, [Fraction(2)]) == HALF
    assert bs.master_value(TWO_POINT, [HALF]) == -4
    assert bs.master_value_discres(TWO_POINT, [HALF]) == -4
    with pytest.raises(OnDiagonal):
        bs.master_value(TWO_POINT, [Fraction(1)])


@given(st.lists(st.fractions(-4, 4, max_denominator=7), min_size=2, max_size=4, unique=True), st.data())
def test_master_value_symmetric_and_discres(t, data):
    p = MasterProblem((1, 2, 1), (Fraction(-5), Fraction(5), Fraction(7, 11)), min(len(t), 2))
    t = t[: p.k]
    if any(a == zl for a in t for zl in p.z):
        return
    perm = data.draw(st.permutations(t))
    assert bs.master_value(p, t) == bs.master_value(p, perm) == bs.master_value_discres(p, t)
    assert sorted(bs.bethe_residual(p, t)) == sorted(bs.bethe_residual(p, perm))


def test_bethe_residual_examples():
    assert bs.bethe_residual(TWO_POINT, [HALF]) == [0]
    p = MasterProblem((1, 1, 1), (0, 1, 2), 1)
    for root in (1 - 1 / math.sqrt(3), 1 + 1 / math.sqrt(3)):
        assert abs(bs.bethe_residual(p, [root])[0]) < 1e-14
    assert bs.bethe_residual(MasterProblem((2,), (0,), 1), [Fraction(1)]) == [2]


@given(st.integers(0, 2**32 - 1))
def test_residual_matches_contour_gradient(seed):
    rng = np.random.default_rng(seed)
    M = tuple(int(x) for x in rng.integers(1, 4, size=3))
    k = int(rng.integers(1, sum(M) // 2 + 1))
    p = MasterProblem(M, bs.generic_points(3, rng), k)
    t = rng.uniform(-1.5, 1.5, k) + 1j * rng.uniform(-1.5, 1.5, k)
    res = bs.bethe_residual(p, t)
    grad = bs.log_gradient_contour(p, t)
    assert np.max(np.abs(res + grad)) <= 1e-8 * max(1.0, np.max(np.abs(res)))


def test_hessian_is_jacobian_of_gradient():
    p = MasterProblem((2, 1, 1), (Fraction(-1), Fraction(0), Fraction(2)), 2)
    t = np.array([0.3 + 0.2j, 1.1 - 0.1j])
    h = 1e-6
    H = bs.hessian(p, t)
    for j in range(2):
        dt = np.zeros(2, dtype=complex)
        dt[j] = h
        fd = -(bs.bethe_residual(p, t + dt) - bs.bethe_residual(p, t - dt)) / (2 * h)
        assert np.allclose(H[:, j], fd, atol=1e-6)


def test_solve_two_points():
    res = bs.solve_orbits(TWO_POINT)
    assert res.agree and len(res.orbits) == 1
    assert abs(res.orbits[0].t[0] - 0.5) < 1e-12


def test_solve_three_points_quadratic():
    res = bs.solve_orbits(MasterProblem((1, 1, 1), (0, 1, 3), 1))
    want = sorted([(8 - math.sqrt(28)) / 6, (8 + math.sqrt(28)) / 6])
    got = sorted(o.t[0].real for o in res.orbits)
    assert np.allclose(got, want, atol=1e-12)


def test_solve_generic_four_points():
    rng = np.random.default_rng(5)
    p = MasterProblem((1, 1, 1, 1), bs.generic_points(4, rng), 2)
    res = bs.solve_orbits(p, SolverConfig(seed=1))
    assert len(res.orbits) == 2 == res.expected
    for o in res.orbits:
        assert o.residual < 1e-10
        assert o.hessian_relative_sv > 1e-6


def test_solver_deterministic():
    p = MasterProblem((2, 1, 1, 1), (Fraction(-1), Fraction(1, 3), Fraction(4, 5), Fraction(2)), 2)
    a = bs.solve_orbits(p, SolverConfig(seed=11))
    b = bs.solve_orbits(p, SolverConfig(seed=11))
    assert [o.t for o in a.orbits] == [o.t for o in b.orbits]
    assert a.starts_used == b.starts_used


def test_no_solutions_when_dimension_is_zero():
    p = MasterProblem((2,), (0,), 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error", bs.SolverWarning)
        res = bs.solve_orbits(p, SolverConfig(max_starts=64))
    assert res.orbits == [] and res.expected == 0 and res.starts_used == 64


def test_exhaustive_finds_no_parasites():
    p = MasterProblem((1, 2, 1), (Fraction(-3, 4), Fraction(1, 5), Fraction(9, 10)), 2)
    res = bs.solve_orbits(p, SolverConfig(seed=2, exhaustive=True))
    assert res.starts_used == res.budget
    assert not res.parasite and res.agree


def test_bethe_vector_examples():
    w = bs.bethe_vector(TWO_POINT, BetheOrbit((HALF,)))
    assert w.entries == {(1, 0): 2, (0, 1): -2}
    top = bs.bethe_vector(MasterProblem((2, 1), (0, 1), 0), BetheOrbit(()))
    assert top.entries == {(0, 0): 1}
    single = MasterProblem((2,), (0,), 1)
    w1 = bs.bethe_vector(single, BetheOrbit((Fraction(3),)))
    assert w1.entries == {(1,): Fraction(1, 3)}
    assert bs.singular_defect(w1) > 0


def test_eigenvalue_examples():
    assert bs.bethe_eigenvalues(TWO_POINT, BetheOrbit((HALF,))) == [Fraction(3, 2), Fraction(-3, 2)]
    M, z = (2, 1, 3), (Fraction(0), Fraction(1), Fraction(-2))
    p0 = MasterProblem(M, z, 0)
    assert bs.bethe_eigenvalues(p0, BetheOrbit(())) == highest_eigenvalues(M, z)


@given(st.integers(0, 2**32 - 1))
def test_eigenvalues_sum_to_zero_on_orbits(seed):
    rng = np.random.default_rng(seed)
    p = MasterProblem((1, 2, 3), bs.generic_points(3, rng), 2)
    res = bs.solve_orbits(p, SolverConfig(seed=seed))
    for o in res.orbits:
        assert abs(sum(bs.bethe_eigenvalues(p, o))) < 1e-9 * max(1.0, max(abs(x) for x in bs.bethe_eigenvalues(p, o)))


def test_eigenvalue_sum_needs_the_bethe_equations():
    # off-shell the two sums no longer cancel
    assert sum(bs.bethe_eigenvalues(TWO_POINT, BetheOrbit((Fraction(2),)))) != 0


@pytest.mark.parametrize("k", [4, 5, 6])
def test_symmetrization_paths_agree(k):
    rng = np.random.default_rng(k)
    M = (3, 2, 2, 1)
    z = list(rng.uniform(-1, 1, 4))
    t = list(rng.uniform(-1, 1, k) + 1j * rng.uniform(-1, 1, k))
    for J in basis_indices(M, k):
        a = bs.bethe_coefficient_perm(J, z, t)
        b = bs.bethe_coefficient_dp(J, z, t)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_bethe_vectors_are_eigenvectors_and_orthogonal():
    rng = np.random.default_rng(3)
    p = MasterProblem((2, 1, 1, 2), bs.generic_points(4, rng), 2)
    res = bs.solve_orbits(p, SolverConfig(seed=4))
    assert res.agree
    sys_ = build_hamiltonians(p.M, [complex(x) for x in p.z], [p.k])
    vecs = [bs.bethe_vector(p, o) for o in res.orbits]
    for o, w in zip(res.orbits, vecs):
        assert eigen_residual(sys_, w, bs.bethe_eigenvalues(p, o)) < 1e-8
        assert bs.singular_defect(w) < 1e-10
    for a, b in combinations(range(len(vecs)), 2):
        s = abs(complex(shapovalov(vecs[a], vecs[b])))
        assert s < 1e-8 * bs.shapovalov_norm(vecs[a]) * bs.shapovalov_norm(vecs[b])


def test_exact_orbit_gives_exact_singular_vector():
    w = bs.bethe_vector(TWO_POINT, BetheOrbit((HALF,)))
    assert act("e", w).is_zero()
    assert isinstance(w.entries[(1, 0)], Fraction)


def test_canonical_and_distance():
    assert bs.canonical([1 + 1j, 1 - 1j, -2]) == (-2, 1 - 1j, 1 + 1j)
    assert bs.multiset_distance([0, 1], [1 + 1e-9, 0]) == pytest.approx(1e-9)
    assert bs.multiset_distance([0], [0, 1]) == math.inf


def test_generic_points_are_distinct_rationals():
    rng = np.random.default_rng(0)
    z = bs.generic_points(6, rng)
    assert len(set(z)) == 6 and all(isinstance(x, Fraction) and abs(x) <= 1 for x in z)
