from fractions import Fraction
from itertools import combinations
from math import prod

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bethewronski import polynomial_core as pc
from bethewronski.polynomial_core import Poly

from conftest import small_rationals

X = pc.x_poly()
HALF = Fraction(1, 2)


def P(*desc):
    return Poly.from_descending([Fraction(c) for c in desc])


# -- Wronskians ---------------------------------------------------------

def test_wronskian2_examples():
    assert pc.wronskian2(X, X * X) == P(1, 0, 0)
    assert pc.wronskian2(P(1, -HALF), P(1, -1, HALF)) == P(1, -1, 0)
    assert pc.wronskian2(P(1), X) == P(1)


def test_wronskian2_proportional_rejected():
    with pytest.raises(pc.ProportionalInputs):
        pc.wronskian2(X, X.scale(3))


def test_wronskian_p_examples():
    assert pc.wronskian_p([P(1), X, X * X]) == P(1)
    assert pc.wronskian_p([X, X * X]) == P(1, 0, 0)


def test_wronskian_p_cubic_oracle():
    # cofactor expansion of [[x^3, x, 1], [3x^2, 1, 0], [6x, 0, 0]] along the last column gives -6x
    m = [[X**3, X, P(1)], [P(3, 0, 0), P(1), Poly.zero()], [P(6, 0), Poly.zero(), Poly.zero()]]
    cofactor = m[1][0] * m[2][1] - m[1][1] * m[2][0]
    assert cofactor == P(-6, 0)
    assert pc.wronskian_det([X**3, X, P(1)]) == cofactor
    assert pc.wronskian_p([X**3, X, P(1)]) == X


def test_wronskian_p_dependent():
    with pytest.raises(pc.DependentInputs):
        pc.wronskian_p([X, X + P(1), P(1)] + [X.scale(2)])


polys = st.lists(small_rationals, min_size=1, max_size=5).map(lambda cs: Poly(tuple(cs)))


@given(polys, polys, small_rationals)
def test_wronskian2_basis_invariance(f, g, c):
    try:
        w = pc.wronskian2(f, g)
    except pc.ProportionalInputs:
        return
    assert pc.wronskian2(f, g + f.scale(c)) == w


@given(st.lists(small_rationals, min_size=9, max_size=9))
def test_wronskian_p_recombination_invariant(entries):
    basis = [X**4 + P(1), X**2 - X, X + P(3)]
    a = [[Fraction(e) for e in entries[3 * i:3 * i + 3]] for i in range(3)]
    det = (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
           + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    if det == 0:
        return
    mixed = [sum((b.scale(a[i][j]) for j, b in enumerate(basis)), Poly.zero()) for i in range(3)]
    assert pc.wronskian_p(mixed) == pc.wronskian_p(basis)


# -- resultants and discriminants ----------------------------------------

def test_resultant_examples():
    # f-rows-first Sylvester convention: Res(x - a, x - b) = b - a
    assert pc.resultant(P(1, -2), P(1, -3)) == -1
    assert pc.resultant(P(1, -1, 0), P(1, -HALF)) == Fraction(-1, 4)
    assert pc.resultant(P(1, 5, 7), P(1)) == 1


def product_resultant(ra, rb, a=1, b=1):
    """``a^deg g b^deg f prod (alpha_i - beta_j)``, the oracle for the Sylvester sign."""
    return a ** len(rb) * b ** len(ra) * prod((x - y for x in ra for y in rb), start=Fraction(1))


@given(st.lists(small_rationals, min_size=1, max_size=4), st.lists(small_rationals, min_size=1, max_size=4),
       st.integers(1, 4), st.integers(1, 4))
def test_resultant_matches_root_product(ra, rb, a, b):
    f = pc.from_roots(ra).scale(a)
    g = pc.from_roots(rb).scale(b)
    assert pc.resultant(f, g) == product_resultant(ra, rb, a, b)
    assert (pc.resultant(f, g) == 0) == bool(set(ra) & set(rb))


def test_resultant_complex_kind_agrees():
    f, g = P(2, -1, 3), P(1, 4, 0, -2)
    exact_value = pc.resultant(f, g)
    assert abs(pc.resultant(f.as_complex(), g.as_complex()) - complex(exact_value)) < 1e-10 * abs(exact_value)


def test_discriminant_examples():
    assert pc.discriminant(P(1, -7)) == 1
    assert pc.discriminant(P(1, 0, -1)) == 4
    assert pc.discriminant(P(1, 0, 0)) == 0


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_discriminant_root_product(n, seed):
    rng = np.random.default_rng(seed)
    ts = list(rng.uniform(-2, 2, n) + 1j * rng.uniform(-2, 2, n))
    oracle = prod((a - b) ** 2 for a, b in combinations(ts, 2))
    value = pc.discriminant(pc.from_roots(ts, pc.COMPLEX))
    assert abs(value - oracle) <= 1e-10 * abs(oracle)


# -- roots --------------------------------------------------------------

def _close_multiset(a, b, tol):
    a, b = sorted(a, key=lambda z: (z.real, z.imag)), list(b)
    for x in a:
        j = min(range(len(b)), key=lambda i: abs(b[i] - x))
        if abs(b[j] - x) > tol:
            return False
        b.pop(j)
    return not b


def test_roots_examples():
    assert _close_multiset(pc.roots(P(1, -1, 0).as_complex()), [0, 1], 1e-12)
    assert _close_multiset(pc.roots(P(1, 0, 1).as_complex()), [1j, -1j], 1e-12)
    double = pc.roots((P(1, -HALF) ** 2).as_complex())
    assert len(double) == 2 and all(abs(r - 0.5) < 1e-9 for r in double)


def test_roots_rejects_constants():
    with pytest.raises(pc.PolynomialError):
        pc.roots(P(3))


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_roots_roundtrip(n, seed):
    rng = np.random.default_rng(seed)
    while True:
        ts = list(rng.uniform(-2, 2, n) + 1j * rng.uniform(-2, 2, n))
        if all(abs(a - b) >= 1e-3 for a, b in combinations(ts, 2)):
            break
    f = pc.from_roots(ts, pc.COMPLEX)
    found = pc.roots(f)
    # root_tolerance bounds the backward error; the forward error is conditioning-limited
    assert all(abs(f(r)) / (1 + f.max_abs_coeff()) < pc.ROOT_TOLERANCE for r in found)
    assert _close_multiset(found, ts, 1e-9)


def test_from_roots_examples():
    assert pc.from_roots([Fraction(0), Fraction(1)]) == P(1, -1, 0)
    assert pc.from_roots([]) == P(1)
    assert pc.from_roots([HALF]) == P(1, -HALF)


# -- misc -----------------------------------------------------------------

def test_json_is_descending_and_roundtrips():
    f = P(3, 0, -HALF)
    assert f.to_json() == {"kind": "rational", "coeffs": ["3/1", "0/1", "-1/2"]}
    assert Poly.from_json(f.to_json()) == f
    g = P(1, 2).as_complex()
    assert g.to_json()["coeffs"] == [[1.0, 0.0], [2.0, 0.0]]


def test_kind_mismatch():
    with pytest.raises(pc.KindMismatch):
        P(1, 1) + P(1, 1).as_complex()


@given(polys, polys.filter(lambda p: not p.is_zero()))
def test_divmod_identity(a, b):
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.degree < b.degree
