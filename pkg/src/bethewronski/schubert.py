"""Schubert calculus on the Grassmannian of p-planes in C^(d+1).

Cohomology classes are integer combinations of partitions inside a
``p x cols`` box (``cols = d + 1 - p``).  Only the Pieri rule is implemented;
products involving one non-special class are read off by Poincare duality,
which is all the counting problems here need.

Partitions are stored as tuples padded with zeros to length ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .errors import NTooSmall
from .exact import binom

Box = tuple  # (rows, cols)


class SchubertError(ValueError):
    pass


class QOutOfRange(SchubertError):
    pass


class CodimensionMismatch(SchubertError):
    pass


class HypothesisViolated(SchubertError):
    pass


class BoxMismatch(SchubertError):
    pass


class InvalidWeight(SchubertError):
    pass


def box_partition(parts: Iterable[int], box: Box) -> tuple:
    """Validate and pad a partition to the box's row count."""
    rows, cols = box
    parts = [int(x) for x in parts]
    while parts and parts[-1] == 0:
        parts.pop()
    if len(parts) > rows:
        raise SchubertError(f"{parts} has more than {rows} rows")
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise SchubertError(f"{parts} is not weakly decreasing")
    if parts and (parts[0] > cols or parts[-1] < 0):
        raise SchubertError(f"{parts} does not fit a {rows}x{cols} box")
    return tuple(parts) + (0,) * (rows - len(parts))


def complement(lam: tuple, box: Box) -> tuple:
    """Reversed complement of ``lam`` in the box (the Poincare dual index)."""
    rows, cols = box
    return tuple(cols - lam[rows - 1 - i] for i in range(rows))


@dataclass(frozen=True)
class CohomologyElement:
    terms: dict = field(default_factory=dict)
    box: Box = (1, 1)

    def __post_init__(self):
        clean = {}
        for lam, c in self.terms.items():
            if c:
                key = box_partition(lam, self.box)
                clean[key] = clean.get(key, 0) + int(c)
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v})

    @classmethod
    def schubert_class(cls, parts: Iterable[int], box: Box) -> "CohomologyElement":
        return cls({box_partition(parts, box): 1}, box)

    @classmethod
    def one(cls, box: Box) -> "CohomologyElement":
        return cls.schubert_class((), box)

    def __add__(self, other: "CohomologyElement") -> "CohomologyElement":
        if other.box != self.box:
            raise BoxMismatch(f"{self.box} vs {other.box}")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return CohomologyElement(out, self.box)

    def __getitem__(self, parts) -> int:
        return self.terms.get(box_partition(parts, self.box), 0)

    def top_coefficient(self) -> int:
        rows, cols = self.box
        return self.terms.get((cols,) * rows, 0)


def horizontal_strips(lam: tuple, q: int, cols: int) -> list[tuple]:
    """All ``mu`` in the box with ``mu / lam`` a horizontal strip of size ``q``."""
    rows = len(lam)
    out = []

    def rec(i, remaining, acc):
        if i == rows:
            if remaining == 0:
                out.append(tuple(acc))
            return
        upper = cols if i == 0 else lam[i - 1]
        for mu_i in range(lam[i], min(upper, lam[i] + remaining) + 1):
            acc.append(mu_i)
            rec(i + 1, remaining - (mu_i - lam[i]), acc)
            acc.pop()

    rec(0, q, [])
    return out


def pieri_multiply(elem: CohomologyElement, q: int) -> CohomologyElement:
    """Multiply by the special class ``sigma_q``."""
    rows, cols = elem.box
    if not 0 <= q <= cols:
        raise QOutOfRange(f"q={q} outside [0, {cols}]")
    out: dict = {}
    for lam, c in elem.terms.items():
        for mu in horizontal_strips(lam, q, cols):
            out[mu] = out.get(mu, 0) + c
    return CohomologyElement(out, elem.box)


@lru_cache(maxsize=None)
def _special_product_cached(qs: tuple, box: Box) -> tuple:
    elem = CohomologyElement.one(box)
    for q in qs:
        elem = pieri_multiply(elem, q)
    return tuple(sorted(elem.terms.items()))


def special_product(qs: Sequence[int], box: Box) -> CohomologyElement:
    """``sigma_{q_1} * ... * sigma_{q_r}`` by iterated Pieri."""
    # the product is commutative; sorting improves cache reuse
    key = tuple(sorted(int(q) for q in qs))
    return CohomologyElement(dict(_special_product_cached(key, tuple(box))), tuple(box))


def intersection_number(qs: Sequence[int], box: Box) -> int:
    rows, cols = box
    if sum(qs) != rows * cols:
        raise CodimensionMismatch(f"codimensions sum to {sum(qs)}, need {rows * cols}")
    return special_product(qs, box).top_coefficient()


def intersection_number_formula(qs: Sequence[int], d: int) -> int:
    """Closed-form alternating sum for ``sigma_{q_1} ... sigma_{q_{n+1}}`` in G_2(C^(d+1)).

    The subsets run over the first ``n`` classes; the last one only enters
    through the codimension constraint.
    """
    qs = [int(q) for q in qs]
    n = len(qs) - 1
    if n < 2:
        raise NTooSmall(f"the formula needs at least three classes, got {len(qs)}")
    if any(q < 0 or q > d - 1 for q in qs):
        raise HypothesisViolated(f"every q must lie in [0, {d - 1}]")
    if sum(qs) != 2 * d - 2:
        raise HypothesisViolated(f"codimensions sum to {sum(qs)}, need {2 * d - 2}")
    total = 0
    for l in range(1, n + 1):
        sign = -1 if (n - l) % 2 else 1
        for sub in combinations(qs[:n], l):
            total += sign * binom(sum(sub) + l - d - 1, n - 2)
    return total


def dual_pairing(a: CohomologyElement, b: CohomologyElement) -> int:
    """Integral of ``a * b`` over the Grassmannian, via Poincare duality."""
    if a.box != b.box:
        raise BoxMismatch(f"{a.box} vs {b.box}")
    return sum(c * b.terms.get(complement(lam, a.box), 0) for lam, c in a.terms.items())


def slp_weight_partition(M: Sequence[int], k: Sequence[int], d: int, p: int) -> tuple:
    """The partition ``w`` describing the condition at infinity for sl_p data.

    ``w_1 = d+1-p-k_{p-1}``, ``w_l = d+1-p-k_{p-l}+k_{p-l+1}`` for ``2 <= l <= p-1``
    and ``w_p = 0``.
    """
    k = list(k)
    if len(k) != p - 1:
        raise InvalidWeight(f"need {p - 1} level counts, got {len(k)}")
    c = d + 1 - p
    w = [c - k[p - 2]]
    for l in range(2, p):
        w.append(c - k[p - l - 1] + k[p - l])
    w.append(0)
    if any(x < 0 or x > c for x in w) or any(a < b for a, b in zip(w, w[1:])):
        raise InvalidWeight(f"w={w} is not a partition in the {p}x{c} box")
    return tuple(w)


def slp_upper_bound(M: Sequence[int], k: Sequence[int], d: int | None = None, p: int = 2) -> int:
    """Intersection number ``prod sigma_{m_i} * sigma_w`` in G_p(C^(d+1)).

    ``d`` defaults to ``|M| - k_1 + p - 1``, the only value for which the
    codimensions can add up.
    """
    M = [int(m) for m in M]
    k = [int(x) for x in k]
    if d is None:
        d = sum(M) - (k[0] if k else 0) + p - 1
    box = (p, d + 1 - p)
    w = slp_weight_partition(M, k, d, p)
    if sum(M) + sum(w) != p * (d + 1 - p):
        raise InvalidWeight(f"codimension {sum(M) + sum(w)} != dim {p * (d + 1 - p)}")
    if any(m > box[1] for m in M):
        # sigma_q vanishes for q wider than the box
        return 0
    prod = special_product(M, box)
    return dual_pairing(prod, CohomologyElement.schubert_class(w, box))
