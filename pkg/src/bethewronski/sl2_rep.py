"""Tensor products of irreducible sl_2 modules in the ``f^J v_M`` basis.

Structure constants on one factor ``L_m`` with basis ``f^j v_m``::

    f . f^j v_m = f^(j+1) v_m        (zero for j = m)
    e . f^j v_m = j (m - j + 1) f^(j-1) v_m
    h . f^j v_m = (m - 2j) f^j v_m

These satisfy ``[e, f] = h`` and make the Shapovalov form diagonal with
``S(f^j v_m, f^j v_m) = j! m! / (m - j)!``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Iterable, Sequence

from . import exact
from .errors import NTooSmall
from .exact import binom


class WeightMismatch(ValueError):
    pass


@dataclass(frozen=True)
class WeightDatum:
    M: tuple
    k: int

    def __post_init__(self):
        M = tuple(int(m) for m in self.M)
        if not M or any(m <= 0 for m in M):
            raise ValueError(f"highest weights must be positive integers, got {self.M}")
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if 2 * self.k > sum(M):
            raise ValueError(f"k={self.k} exceeds |M|/2 = {sum(M) / 2}")
        object.__setattr__(self, "M", M)

    @property
    def n(self) -> int:
        return len(self.M)

    @property
    def total(self) -> int:
        return sum(self.M)


@dataclass(frozen=True)
class TensorState:
    """Sparse vector ``sum_J c_J f^J v_M``; absent multi-indices are zero."""

    M: tuple
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        M = tuple(self.M)
        clean = {}
        for J, c in self.entries.items():
            J = tuple(J)
            if len(J) != len(M) or any(j < 0 or j > m for j, m in zip(J, M)):
                raise ValueError(f"multi-index {J} out of range for M={M}")
            if c != 0:
                clean[J] = c
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "entries", clean)

    @classmethod
    def highest(cls, M: Sequence[int], c=Fraction(1)) -> "TensorState":
        return cls(tuple(M), {(0,) * len(M): c})

    @classmethod
    def basis_vector(cls, M: Sequence[int], J: Sequence[int], c=Fraction(1)) -> "TensorState":
        return cls(tuple(M), {tuple(J): c})

    def _check(self, other: "TensorState"):
        if other.M != self.M:
            raise WeightMismatch(f"{self.M} vs {other.M}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.entries)
        for J, c in other.entries.items():
            out[J] = out.get(J, 0) + c
        return TensorState(self.M, out)

    def __neg__(self):
        return TensorState(self.M, {J: -c for J, c in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TensorState":
        return TensorState(self.M, {J: c * v for J, v in self.entries.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __getitem__(self, J):
        return self.entries.get(tuple(J), 0)

    def is_zero(self) -> bool:
        return not self.entries

    def weights(self) -> set:
        return {sum(J) for J in self.entries}

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector."""
        return sum(abs(complex(c)) ** 2 for c in self.entries.values()) ** 0.5


def basis_indices(M: Sequence[int], k: int) -> list[tuple]:
    """Multi-indices ``J`` with ``|J| = k``, ``0 <= j_i <= m_i``, in lexicographic order."""
    return list(_basis_indices(tuple(M), k))


@lru_cache(maxsize=None)
def _basis_indices(M: tuple, k: int) -> tuple:
    if not M:
        return ((),) if k == 0 else ()
    out = []
    rest_cap = sum(M[1:])
    for j in range(max(0, k - rest_cap), min(M[0], k) + 1):
        for tail in _basis_indices(M[1:], k - j):
            out.append((j,) + tail)
    return tuple(out)


def block_dimension(M: Sequence[int], k: int) -> int:
    return len(_basis_indices(tuple(M), k))


def _act_single(gen: str, m: int, j: int):
    """Image of ``f^j v_m`` under ``gen`` as ``(coefficient, new j)`` or ``None``."""
    if gen == "e":
        return (j * (m - j + 1), j - 1) if j > 0 else None
    if gen == "f":
        return (1, j + 1) if j < m else None
    if gen == "h":
        return (m - 2 * j, j) if m != 2 * j else None
    raise ValueError(f"unknown generator {gen!r}")


def act(generator: str, v: TensorState) -> TensorState:
    """Diagonal action ``x (x) 1 ... + ... + 1 (x) ... x`` of ``e``, ``f`` or ``h``."""
    out: dict = {}
    for J, c in v.entries.items():
        for i, (m, j) in enumerate(zip(v.M, J)):
            img = _act_single(generator, m, j)
            if img is None:
                continue
            coef, nj = img
            K = J[:i] + (nj,) + J[i + 1:]
            out[K] = out.get(K, 0) + coef * c
    return TensorState(v.M, out)


def act_on_factor(generator: str, i: int, v: TensorState) -> TensorState:
    """Action of ``generator`` on the ``i``-th tensor factor only."""
    out: dict = {}
    m = v.M[i]
    for J, c in v.entries.items():
        img = _act_single(generator, m, J[i])
        if img is None:
            continue
        coef, nj = img
        K = J[:i] + (nj,) + J[i + 1:]
        out[K] = out.get(K, 0) + coef * c
    return TensorState(v.M, out)


def shapovalov_weight(M: Sequence[int], J: Sequence[int]) -> int:
    """``S(f^J v_M, f^J v_M) = prod_i j_i! m_i! / (m_i - j_i)!``."""
    out = 1
    for m, j in zip(M, J):
        out *= factorial(j) * factorial(m) // factorial(m - j)
    return out


def shapovalov(u: TensorState, v: TensorState):
    if u.M != v.M:
        raise WeightMismatch(f"{u.M} vs {v.M}")
    small, big = (u, v) if len(u.entries) <= len(v.entries) else (v, u)
    total = 0
    for J, c in small.entries.items():
        d = big.entries.get(J)
        if d is not None:
            total += shapovalov_weight(u.M, J) * c * d
    return total


def raising_rows(M: Sequence[int], k: int) -> list[dict]:
    """Matrix of ``e`` from weight block ``k`` to block ``k-1`` as sparse rows.

    Columns index ``basis_indices(M, k)``, rows index ``basis_indices(M, k-1)``.
    """
    cols = basis_indices(M, k)
    rows_idx = {J: r for r, J in enumerate(basis_indices(M, k - 1))} if k > 0 else {}
    rows = [dict() for _ in rows_idx]
    for c, J in enumerate(cols):
        image = act("e", TensorState.basis_vector(M, J, 1))
        for K, coef in image.entries.items():
            rows[rows_idx[K]][c] = coef
    return rows


def sing_basis(wd: WeightDatum) -> list[TensorState]:
    """Exact basis of the singular vectors of weight ``|M| - 2k``.

    Each vector is scaled so its first nonzero coordinate (in lexicographic
    ``J`` order) equals 1.
    """
    cols = basis_indices(wd.M, wd.k)
    if wd.k == 0:
        return [TensorState.highest(wd.M)]
    null = exact.nullspace(raising_rows(wd.M, wd.k), len(cols))
    out = []
    for vec in null:
        lead = next(c for c in vec if c != 0)
        out.append(TensorState(wd.M, {J: c / lead for J, c in zip(cols, vec) if c}))
    return out


def dim_sing_kernel(wd: WeightDatum) -> int:
    """Kernel dimension of ``e`` on the weight block (rank-nullity, exact)."""
    if wd.k == 0:
        return 1
    return block_dimension(wd.M, wd.k) - exact.rank(raising_rows(wd.M, wd.k))


def dim_sing_formula(wd: WeightDatum) -> int:
    """Closed alternating-binomial formula for ``dim Sing_k``."""
    n = wd.n
    if n < 2:
        raise NTooSmall("the closed formula needs at least two factors")
    total = 0
    for q in range(n + 1):
        sign = -1 if q % 2 else 1
        for sub in combinations(wd.M, q):
            total += sign * binom(wd.k + n - 2 - sum(sub) - q, n - 2)
    return total


def character(m: int) -> dict:
    """Weight multiplicities of ``L_m``: weights ``m, m-2, ..., -m``."""
    return {m - 2 * j: 1 for j in range(m + 1)}


def tensor_character(qs: Iterable[int]) -> dict:
    ch = {0: 1}
    for q in qs:
        nxt: dict = {}
        for w, a in ch.items():
            for j in range(q + 1):
                key = w + q - 2 * j
                nxt[key] = nxt.get(key, 0) + a
        ch = nxt
    return ch


def multiplicity(qs: Iterable[int], top: int) -> int:
    """Multiplicity of ``L_top`` in ``L_{q_1} (x) ... (x) L_{q_r}``."""
    ch = tensor_character(qs)
    return ch.get(top, 0) - ch.get(top + 2, 0)


def multiplicity_trivial(qs: Iterable[int]) -> int:
    """Multiplicity of the trivial module ``L_0``."""
    qs = [int(q) for q in qs]
    if any(q < 0 for q in qs):
        raise ValueError("highest weights must be nonnegative")
    return multiplicity(qs, 0)
