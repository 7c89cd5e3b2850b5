"""Gaudin Hamiltonians ``H_i(z) = sum_{j != i} Omega_ij / (z_i - z_j)``.

``Omega = e (x) f + f (x) e + 1/2 h (x) h`` acts on factors ``i`` and ``j``.
Operators commute with the diagonal sl_2 action, so they are materialized
one weight block at a time as sparse column maps over the ``f^J v_M`` basis.
The scalar kind follows ``z``: rational ``z`` gives exact operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from . import exact
from .errors import CoincidingPoints
from .sl2_rep import (
    TensorState,
    act,
    act_on_factor,
    basis_indices,
    shapovalov_weight,
    sing_basis,
    WeightDatum,
)


class ZeroVector(ValueError):
    pass


def _half(exact_kind: bool):
    return Fraction(1, 2) if exact_kind else 0.5


def casimir_pair(i: int, j: int, v: TensorState) -> TensorState:
    """``Omega_ij v``: the Casimir on factors ``i`` and ``j``, identity elsewhere."""
    n = len(v.M)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"need distinct factor indices in [0, {n}), got {i}, {j}")
    exact_kind = all(isinstance(c, Rational) for c in v.entries.values())
    ef = act_on_factor("e", i, act_on_factor("f", j, v))
    fe = act_on_factor("f", i, act_on_factor("e", j, v))
    hh = act_on_factor("h", i, act_on_factor("h", j, v)).scale(_half(exact_kind))
    return ef + fe + hh


@dataclass(frozen=True)
class SparseOperator:
    """Linear map on one weight block; ``cols[c]`` maps row index -> entry."""

    basis: tuple
    cols: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self) -> dict:
        return {J: r for r, J in enumerate(self.basis)}

    def entry(self, r: int, c: int):
        return self.cols[c].get(r, 0)

    def apply(self, v: TensorState) -> TensorState:
        idx = self.index()
        out: dict = {}
        for J, coef in v.entries.items():
            c = idx[J]
            for r, a in self.cols[c].items():
                K = self.basis[r]
                out[K] = out.get(K, 0) + a * coef
        return TensorState(v.M, out)

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        cols = []
        for bcol in other.cols:
            acc: dict = {}
            for r, b in bcol.items():
                for rr, a in self.cols[r].items():
                    acc[rr] = acc.get(rr, 0) + a * b
            cols.append({r: x for r, x in acc.items() if x != 0})
        return SparseOperator(self.basis, tuple(cols))

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        cols = []
        for a, b in zip(self.cols, other.cols):
            acc = dict(a)
            for r, x in b.items():
                acc[r] = acc.get(r, 0) + x
            cols.append({r: x for r, x in acc.items() if x != 0})
        return SparseOperator(self.basis, tuple(cols))

    def scale(self, c) -> "SparseOperator":
        return SparseOperator(self.basis, tuple({r: c * x for r, x in col.items()} for col in self.cols))

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return all(not col for col in self.cols)

    def max_abs(self) -> float:
        return max((abs(complex(x)) for col in self.cols for x in col.values()), default=0.0)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.dim, self.dim), dtype=complex)
        for c, col in enumerate(self.cols):
            for r, x in col.items():
                a[r, c] = complex(x)
        return a


def _pair_operator(M: tuple, basis: list, i: int, j: int) -> list[dict]:
    idx = {J: r for r, J in enumerate(basis)}
    cols = []
    for J in basis:
        img = casimir_pair(i, j, TensorState.basis_vector(M, J, Fraction(1)))
        cols.append({idx[K]: c for K, c in img.entries.items()})
    return cols


def _check_points(z: Sequence) -> None:
    for a in range(len(z)):
        for b in range(a + 1, len(z)):
            if z[a] == z[b]:
                raise CoincidingPoints(f"z[{a}] == z[{b}] == {z[a]}")


@dataclass(frozen=True)
class GaudinSystem:
    M: tuple
    z: tuple
    blocks: dict = field(default_factory=dict)  # k -> tuple of n SparseOperator

    @property
    def n(self) -> int:
        return len(self.M)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Rational) for x in self.z)

    def hamiltonians(self, k: int) -> tuple:
        if k not in self.blocks:
            raise KeyError(f"weight block k={k} was not built")
        return self.blocks[k]

    def apply(self, i: int, v: TensorState) -> TensorState:
        """``H_i v`` for a vector supported on built blocks."""
        out = TensorState(self.M, {})
        for k in v.weights():
            part = TensorState(self.M, {J: c for J, c in v.entries.items() if sum(J) == k})
            out = out + self.hamiltonians(k)[i].apply(part)
        return out


def build_hamiltonians(M: Sequence[int], z: Sequence, ks: Sequence[int] | None = None) -> GaudinSystem:
    """Materialize ``H_1 .. H_n`` on the requested weight blocks (default: all)."""
    M = tuple(int(m) for m in M)
    z = tuple(Fraction(x) if isinstance(x, (int, Rational)) else complex(x) for x in z)
    if len(z) != len(M):
        raise ValueError("need one point per tensor factor")
    _check_points(z)
    n = len(M)
    if ks is None:
        ks = range(sum(M) + 1)
    blocks = {}
    for k in ks:
        basis = basis_indices(M, k)
        pair = {}
        for i in range(n):
            for j in range(i + 1, n):
                pair[(i, j)] = _pair_operator(M, basis, i, j)
        ops = []
        for i in range(n):
            acc: list[dict] = [dict() for _ in basis]
            for j in range(n):
                if j == i:
                    continue
                w = 1 / (z[i] - z[j])
                for c, col in enumerate(pair[(min(i, j), max(i, j))]):
                    for r, x in col.items():
                        acc[c][r] = acc[c].get(r, 0) + w * x
            ops.append(SparseOperator(tuple(basis), tuple({r: x for r, x in col.items() if x != 0} for col in acc)))
        blocks[k] = tuple(ops)
    return GaudinSystem(M, z, blocks)


def eigen_residual(sys: GaudinSystem, w: TensorState, lambdas: Sequence) -> float:
    """``max_i ||H_i w - lambda_i w|| / ||w||`` in the coefficient norm."""
    norm = w.norm()
    if norm == 0:
        raise ZeroVector("eigen_residual of the zero vector")
    worst = 0.0
    for i, lam in enumerate(lambdas):
        r = sys.apply(i, w) - w.scale(lam)
        worst = max(worst, r.norm() / norm)
    return worst


# ---- algebraic checks on one block -------------------------------------

def commutators_vanish(sys: GaudinSystem, k: int) -> dict:
    """``{(i, j): max |[H_i, H_j]|}`` over one block (exactly 0 in the exact kind)."""
    ops = sys.hamiltonians(k)
    out = {}
    for i in range(sys.n):
        for j in range(i + 1, sys.n):
            comm = ops[i] @ ops[j] - ops[j] @ ops[i]
            out[(i, j)] = 0 if comm.is_zero() else comm.max_abs()
    return out


def sum_vanishes(sys: GaudinSystem, k: int) -> bool:
    ops = sys.hamiltonians(k)
    total = ops[0]
    for op in ops[1:]:
        total = total + op
    return total.is_zero()


def shapovalov_symmetric(sys: GaudinSystem, k: int) -> bool:
    """``S(H_i u, v) = S(u, H_i v)`` on basis vectors, i.e. ``S H_i`` symmetric."""
    for op in sys.hamiltonians(k):
        s = [shapovalov_weight(sys.M, J) for J in op.basis]
        for c, col in enumerate(op.cols):
            for r, x in col.items():
                if s[r] * x != s[c] * op.entry(c, r):
                    return False
    return True


def commutes_with_sl2(sys: GaudinSystem, k: int) -> bool:
    """``H_i e = e H_i`` and ``H_i f = f H_i`` on every basis vector of block ``k``."""
    for i, op in enumerate(sys.hamiltonians(k)):
        for J in op.basis:
            v = TensorState.basis_vector(sys.M, J, Fraction(1))
            Hv = op.apply(v)
            for gen in ("e", "f"):
                lhs = sys.apply(i, act(gen, v))
                rhs = act(gen, Hv)
                if not (lhs - rhs).is_zero():
                    return False
    return True


def preserves_sing(sys: GaudinSystem, k: int) -> bool:
    """Each ``H_i`` maps ``Sing_k`` into its own span (exact elimination)."""
    basis = sing_basis(WeightDatum(sys.M, k))
    idx = {J: r for r, J in enumerate(basis_indices(sys.M, k))}
    span_rows = [{idx[J]: c for J, c in v.entries.items()} for v in basis]
    base_rank = exact.rank(span_rows)
    for op in sys.hamiltonians(k):
        for v in basis:
            img = op.apply(v)
            row = {idx[J]: c for J, c in img.entries.items()}
            if exact.rank(span_rows + [row]) != base_rank:
                return False
    return True


def highest_eigenvalues(M: Sequence[int], z: Sequence) -> list:
    """Eigenvalues of ``H_i`` on ``v_M``: ``sum_{j != i} m_i m_j / (2 (z_i - z_j))``."""
    n = len(M)
    exact_kind = all(isinstance(x, (int, Rational)) for x in z)
    two = Fraction(2) if exact_kind else 2.0
    return [sum(M[i] * M[j] / (two * (z[i] - z[j])) for j in range(n) if j != i) for i in range(n)]
