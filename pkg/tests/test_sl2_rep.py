from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bethewronski import sl2_rep as rep
from bethewronski.errors import NTooSmall
from bethewronski.sl2_rep import TensorState, WeightDatum

from conftest import small_rationals

weights = st.lists(st.integers(1, 3), min_size=1, max_size=4).filter(lambda M: sum(M) <= 10)


def random_state(M, data, k=None):
    ks = range(sum(M) + 1) if k is None else [k]
    idx = [J for kk in ks for J in rep.basis_indices(M, kk)]
    coeffs = data.draw(st.lists(small_rationals, min_size=len(idx), max_size=len(idx)))
    return TensorState(tuple(M), dict(zip(idx, coeffs)))


def test_act_examples():
    v = TensorState.basis_vector((1, 1), (1, 0))
    assert rep.act("e", v).entries == {(0, 0): 1}
    w = TensorState.basis_vector((1, 1), (1, 1))
    assert rep.act("h", w).entries == {(1, 1): -2}
    assert rep.act("e", TensorState.highest((2, 3, 1))).is_zero()


def test_shapovalov_examples():
    fv = TensorState.basis_vector((2,), (1,))
    assert rep.shapovalov(fv, fv) == 2
    top = TensorState.highest((3, 1))
    assert rep.shapovalov(top, top) == 1
    assert rep.shapovalov(TensorState.basis_vector((1, 1), (1, 0)), TensorState.basis_vector((1, 1), (0, 1))) == 0


def test_sing_basis_examples():
    (s,) = rep.sing_basis(WeightDatum((1, 1), 1))
    assert s.entries == {(0, 1): 1, (1, 0): -1}
    assert len(rep.sing_basis(WeightDatum((1, 1, 1), 1))) == 2
    for m in range(1, 5):
        for k in range(1, m // 2 + 1):
            assert rep.sing_basis(WeightDatum((m,), k)) == []


def test_dim_formula_examples():
    assert rep.dim_sing_formula(WeightDatum((1, 1), 1)) == 1
    assert rep.dim_sing_formula(WeightDatum((1, 1, 1), 1)) == 2
    assert rep.dim_sing_formula(WeightDatum((1, 1), 0)) == 1
    with pytest.raises(NTooSmall):
        rep.dim_sing_formula(WeightDatum((3,), 1))


def test_multiplicity_examples():
    assert rep.multiplicity_trivial((1, 1)) == 1
    assert rep.multiplicity_trivial((1, 1, 1, 1)) == 2
    assert rep.multiplicity_trivial((2, 2, 2)) == 1


def test_weight_datum_rejects_large_k():
    with pytest.raises(ValueError, match=r"exceeds \|M\|/2"):
        WeightDatum((1, 1), 5)


@given(weights, st.data())
def test_commutation_relation(M, data):
    v = random_state(M, data)
    lhs = rep.act("e", rep.act("f", v)) - rep.act("f", rep.act("e", v))
    assert (lhs - rep.act("h", v)).is_zero()


@given(weights, st.data())
def test_shapovalov_contravariance(M, data):
    k = data.draw(st.integers(1, sum(M)))
    u = random_state(M, data, k - 1)
    v = random_state(M, data, k)
    assert rep.shapovalov(rep.act("e", v), u) == rep.shapovalov(v, rep.act("f", u))


@given(weights.filter(lambda M: sum(M) >= 2), st.data())
def test_sing_basis_is_singular(M, data):
    k = data.draw(st.integers(0, sum(M) // 2))
    for w in rep.sing_basis(WeightDatum(M, k)):
        assert rep.act("e", w).is_zero()
        assert (rep.act("h", w) - w.scale(sum(M) - 2 * k)).is_zero()
        assert w.entries[min(w.entries)] == 1


def kernel_dimension_float(M, k):
    """Oracle: numerical rank of the dense raising matrix."""
    rows = rep.raising_rows(M, k)
    ncols = rep.block_dimension(M, k)
    if k == 0:
        return 1
    a = np.zeros((len(rows), ncols))
    for r, row in enumerate(rows):
        for c, x in row.items():
            a[r, c] = float(x)
    return ncols - np.linalg.matrix_rank(a)


@given(weights.filter(lambda M: len(M) >= 2), st.data())
def test_dimension_triple(M, data):
    k = data.draw(st.integers(0, sum(M) // 2))
    wd = WeightDatum(M, k)
    kernel = rep.dim_sing_kernel(wd)
    assert kernel == len(rep.sing_basis(wd)) == kernel_dimension_float(M, k)
    assert kernel == rep.dim_sing_formula(wd) == rep.multiplicity_trivial(list(M) + [sum(M) - 2 * k])


def test_lowering_and_raising_constants():
    v = TensorState.basis_vector((4,), (1,))
    assert rep.act("f", v).entries == {(2,): 1}
    assert rep.act("e", v).entries == {(0,): 4}
    assert rep.act("e", TensorState.basis_vector((4,), (3,))).entries == {(2,): 6}


def test_exact_arithmetic_only():
    for w in rep.sing_basis(WeightDatum((2, 1, 1), 2)):
        assert all(isinstance(c, (int, Fraction)) for c in w.entries.values())
