import itertools

import pytest
from hypothesis import given, strategies as st

from bethewronski import schubert as sch
from bethewronski.errors import NTooSmall
from bethewronski.schubert import CohomologyElement as CE
from bethewronski.sl2_rep import multiplicity_trivial

BOX22 = (2, 2)
BOX21 = (2, 1)


def clebsch_gordan_trivial(qs):
    """Independent oracle: iterate L_a (x) L_b = L_{|a-b|} + ... + L_{a+b} and count L_0."""
    mult = {0: 1}
    for q in qs:
        nxt = {}
        for a, c in mult.items():
            for top in range(abs(a - q), a + q + 1, 2):
                nxt[top] = nxt.get(top, 0) + c
        mult = nxt
    return mult.get(0, 0)


def test_pieri_examples():
    one = CE.one(BOX22)
    assert sch.pieri_multiply(one, 0).terms == one.terms
    s1 = CE.schubert_class((1,), BOX22)
    assert sch.pieri_multiply(s1, 1).terms == {(2, 0): 1, (1, 1): 1}
    assert sch.pieri_multiply(CE.schubert_class((1,), BOX21), 1).terms == {(1, 1): 1}


def test_pieri_rejects_wide_q():
    with pytest.raises(sch.QOutOfRange):
        sch.pieri_multiply(CE.one(BOX22), 3)


def test_intersection_number_examples():
    assert sch.intersection_number((1, 1), BOX21) == 1
    assert sch.intersection_number((1, 1, 1, 1), BOX22) == 2
    assert sch.intersection_number((2, 2, 2), (2, 3)) == 1
    with pytest.raises(sch.CodimensionMismatch):
        sch.intersection_number((1, 1), BOX22)


def test_formula_examples():
    assert sch.intersection_number_formula((1, 1, 1, 1), 3) == 2
    assert sch.intersection_number_formula((2, 2, 2), 4) == 1
    with pytest.raises(NTooSmall):
        sch.intersection_number_formula((1, 1), 2)


def test_dual_pairing_examples():
    s20, s10 = CE.schubert_class((2,), BOX22), CE.schubert_class((1,), BOX22)
    assert sch.dual_pairing(s20, s20) == 1
    assert sch.dual_pairing(s10, s10) == 0
    # sigma_1^4 = 2 sigma_{2,2} has top degree, so it does pair with the unit
    assert sch.dual_pairing(sch.special_product((1, 1, 1, 1), BOX22), CE.one(BOX22)) == 2
    assert sch.dual_pairing(sch.special_product((1, 1, 1), BOX22), CE.one(BOX22)) == 0
    assert sch.dual_pairing(s10, CE.one(BOX22)) == 0


def test_slp_upper_bound_examples():
    assert sch.slp_upper_bound((1, 1, 1, 1), (2,), p=2) == 2
    assert sch.slp_upper_bound((1, 1), (1,), p=2) == 1
    assert sch.slp_upper_bound((1, 1, 1), (1, 0), p=3) == 2


def test_slp_weight_partition_rejects_escape():
    with pytest.raises(sch.InvalidWeight):
        sch.slp_weight_partition((1, 1), (2, 1), 2, 3)


def random_element(box, coeffs):
    rows, cols = box
    parts = [p for p in itertools.product(range(cols + 1), repeat=rows) if list(p) == sorted(p, reverse=True)]
    return CE({lam: c for lam, c in zip(parts, coeffs)}, box)


boxes = st.tuples(st.integers(1, 3), st.integers(1, 4))


@given(boxes, st.lists(st.integers(0, 5), min_size=1, max_size=15), st.data())
def test_pieri_commutes_and_is_positive(box, coeffs, data):
    e = random_element(box, coeffs)
    q1 = data.draw(st.integers(0, box[1]))
    q2 = data.draw(st.integers(0, box[1]))
    a = sch.pieri_multiply(sch.pieri_multiply(e, q1), q2)
    b = sch.pieri_multiply(sch.pieri_multiply(e, q2), q1)
    assert a.terms == b.terms
    assert all(c > 0 for c in a.terms.values())


@given(st.integers(2, 6), st.data())
def test_intersection_number_permutation_invariant(d, data):
    cols = d - 1
    qs = data.draw(st.lists(st.integers(0, cols), min_size=3, max_size=5))
    if sum(qs) != 2 * cols:
        return
    perm = data.draw(st.permutations(qs))
    assert sch.intersection_number(qs, (2, cols)) == sch.intersection_number(perm, (2, cols))


@given(st.integers(2, 7), st.data())
def test_triple_agreement_random(d, data):
    qs = data.draw(st.lists(st.integers(0, d - 1), min_size=3, max_size=5))
    if sum(qs) != 2 * d - 2:
        return
    pieri = sch.intersection_number(qs, (2, d - 1))
    assert pieri == sch.intersection_number_formula(qs, d) == multiplicity_trivial(qs) == clebsch_gordan_trivial(qs)


def test_slp_bound_reduces_to_sl2():
    for M in [(1, 1, 1, 1), (2, 1, 1), (3, 2, 1), (2, 2, 2)]:
        for k in range(sum(M) // 2 + 1):
            d = sum(M) - k + 1
            qs = (*M, sum(M) - 2 * k)
            assert sch.slp_upper_bound(M, (k,), p=2) == clebsch_gordan_trivial(qs) == sch.intersection_number(qs, (2, d - 1))
