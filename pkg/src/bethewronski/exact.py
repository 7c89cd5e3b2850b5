"""Exact rational linear algebra on sparse rows.

Rows are ``dict`` objects mapping a column index to a nonzero
:class:`fractions.Fraction`.  Everything here is exact; there is no pivoting
by magnitude because there is no rounding to control.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

SparseRow = dict


def binom(a: int, b: int) -> int:
    """Binomial coefficient with ``C(a, b) = 0`` whenever ``a < b``.

    Negative ``a`` is allowed (and gives 0 as long as ``a < b``).  Negative
    ``b`` is rejected: the closed-form dimension formulas never need it.
    """
    if b < 0:
        raise ValueError(f"binomial lower index must be nonnegative, got {b}")
    if a < b:
        return 0
    return comb(a, b)


def _axpy(row: dict, scale, other: dict) -> None:
    # row <- row - scale * other, in place, dropping exact zeros
    for c, v in other.items():
        nv = row.get(c, 0) - scale * v
        if nv:
            row[c] = nv
        else:
            row.pop(c, None)


def rref(rows: Iterable[dict]) -> dict:
    """Reduced row echelon form of a sparse matrix.

    Returns a mapping ``pivot column -> reduced row``; each reduced row has a
    1 at its pivot column and 0 at every other pivot column.
    """
    pivots: dict = {}
    for raw in rows:
        r = {c: Fraction(v) for c, v in raw.items() if v}
        for c in [c for c in r if c in pivots]:
            if c in r:
                _axpy(r, r[c], pivots[c])
        if not r:
            continue
        pc = min(r)
        inv = 1 / r[pc]
        r = {c: v * inv for c, v in r.items()}
        for c, prow in pivots.items():
            if pc in prow:
                _axpy(prow, prow[pc], r)
        pivots[pc] = r
    return pivots


def rank(rows: Iterable[dict]) -> int:
    return len(rref(rows))


def nullspace(rows: Iterable[dict], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{v : A v = 0}`` for the sparse matrix ``A`` with ``ncols`` columns.

    The basis is the standard one attached to the free columns of the RREF,
    listed by increasing free column.
    """
    piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for pc, prow in piv.items():
            if f in prow:
                v[pc] = -prow[f]
        basis.append(v)
    return basis


def dense_to_sparse(matrix: Sequence[Sequence]) -> list[dict]:
    return [{j: v for j, v in enumerate(row) if v} for row in matrix]


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One exact solution of ``A x = b`` or ``None`` when inconsistent.

    Free variables are set to zero.
    """
    n = len(matrix[0]) if matrix else 0
    aug = []
    for row, b in zip(matrix, rhs):
        r = {j: Fraction(v) for j, v in enumerate(row) if v}
        if b:
            r[n] = Fraction(b)
        aug.append(r)
    piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for pc, prow in piv.items():
        x[pc] = prow.get(n, Fraction(0))
    return x


def det(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant by Gaussian elimination over the rationals."""
    a = [[Fraction(v) for v in row] for row in matrix]
    n = len(a)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        p = a[col][col]
        result *= p
        for r in range(col + 1, n):
            if a[r][col]:
                factor = a[r][col] / p
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return sign * result
