"""The Wronski map on planes of polynomials and the Heine--Stieltjes correspondence.

A plane is stored by its canonical basis: reduced row echelon form of the
descending coefficient matrix, so basis polynomial ``i`` is monic of degree
``d_i`` and has zero coefficient at every other pivot degree ``d_j``.

For a 2-plane ``span{F, G}`` with ``deg F = k < deg G`` the Wronskian
condition ``F'G - FG' = W`` is equivalent to ``(G/F)' = -W/F^2``.  Writing

    W/F^2 = Q + sum_i a_i/(x - t_i) + b_i/(x - t_i)^2,

the partner ``G`` exists iff every ``a_i`` vanishes, and ``a_i/b_i`` is
exactly the Bethe residual at ``t_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from . import exact
from . import polynomial_core as pc
from .bethe_sl2 import BetheOrbit, MasterProblem, make_orbit

OBSTRUCTION_TOL = 1e-8
PIVOT_RTOL = 1e-9


class ResidueObstruction(ValueError):
    pass


class SharedRoot(ValueError):
    pass


class DegeneratePlane(ValueError):
    pass


class DependentBasis(ValueError):
    pass


def _rref_complex(rows: np.ndarray, rtol: float = PIVOT_RTOL):
    """Column-pivoted RREF of a complex matrix; returns (reduced rows, pivot cols)."""
    a = np.array(rows, dtype=complex)
    nrows, ncols = a.shape
    scale = max(np.max(np.abs(a)) if a.size else 0.0, 1e-300)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[piv, c]) <= rtol * scale:
            a[r:, c] = 0
            continue
        a[[r, piv]] = a[[piv, r]]
        a[r] /= a[r, c]
        others = [i for i in range(nrows) if i != r]
        a[others] -= np.outer(a[others, c], a[r])
        a[others, c] = 0
        pivots.append(c)
        r += 1
    return a[:r], pivots


@dataclass(frozen=True)
class PolyPlane:
    """A ``p``-dimensional space of polynomials in canonical basis."""

    basis: tuple
    kind: str = pc.RATIONAL

    @classmethod
    def span(cls, polys: Sequence[pc.Poly]) -> "PolyPlane":
        polys = [p for p in polys]
        if not polys:
            raise DependentBasis("empty basis")
        kind = polys[0].kind
        if any(p.kind != kind for p in polys):
            raise pc.KindMismatch("mixed scalar kinds")
        d = max(p.degree for p in polys)
        width = d + 1
        mat = [[p.coeff(d - c) for c in range(width)] for p in polys]
        if kind == pc.RATIONAL:
            red = exact.rref(exact.dense_to_sparse(mat))
            if len(red) != len(polys):
                raise DependentBasis("polynomials are linearly dependent")
            basis = []
            for col in sorted(red):
                row = red[col]
                basis.append(pc.Poly.from_descending([row.get(c, 0) for c in range(width)], kind))
        else:
            rows, piv = _rref_complex(np.array([[complex(x) for x in r] for r in mat]))
            if len(piv) != len(polys):
                raise DependentBasis("polynomials are numerically dependent")
            basis = [pc.Poly.from_descending(list(row), kind) for row in rows]
        return cls(tuple(basis), kind)

    @property
    def p(self) -> int:
        return len(self.basis)

    @property
    def ambient_degree(self) -> int:
        return self.basis[0].degree

    @property
    def type(self) -> tuple:
        return tuple(b.degree for b in self.basis)

    def smallest(self) -> pc.Poly:
        return self.basis[-1]

    def coefficient_rows(self, d: int | None = None) -> list:
        d = self.ambient_degree if d is None else d
        return [[b.coeff(d - c) for c in range(d + 1)] for b in self.basis]

    def to_json(self) -> dict:
        return {"type": list(self.type), "basis": [b.to_json() for b in self.basis]}


def plane_distance(U: PolyPlane, V: PolyPlane) -> float:
    """Max coefficientwise relative distance between canonical bases (inf if types differ)."""
    if U.type != V.type:
        return float("inf")
    return max(pc.rel_distance(a, b) for a, b in zip(U.basis, V.basis))


def plane_wronskian(V: PolyPlane) -> pc.Poly:
    return pc.wronskian_p(list(V.basis))


@dataclass(frozen=True)
class WronskiTarget:
    z: tuple
    m: tuple

    def __post_init__(self):
        if len(self.z) != len(self.m):
            raise ValueError("one multiplicity per point")
        if len(set(self.z)) != len(self.z):
            raise ValueError("points must be pairwise distinct")

    @property
    def W(self) -> pc.Poly:
        return MasterProblem(self.m, self.z, 0).wronskian_target()


# ---- partner reconstruction ---------------------------------------------

def _deflate(F: pc.Poly, t) -> pc.Poly:
    """``F / (x - t)`` by synthetic division (remainder discarded)."""
    q, _ = F.divmod(pc.Poly((-t, 1), F.kind))
    return q


def residue_data(W: pc.Poly, F: pc.Poly, ts: Sequence[complex] | None = None, zs: Sequence[complex] | None = None):
    """Partial-fraction data of ``W / F^2`` at the roots of monic ``F``.

    Returns ``(ts, a, b, rel)``: simple-pole coefficients ``a``, double-pole
    coefficients ``b`` and the scale-free obstruction ``|a_i / b_i| / S_i``,
    where ``a_i / b_i`` is the Bethe residual at ``t_i`` and ``S_i`` is the
    total size of the terms it is made of.
    """
    Fc, Wc = F.as_complex(), W.as_complex()
    if ts is None:
        ts = pc.roots(Fc)
    if zs is None:
        zs = pc.roots(Wc) if Wc.degree >= 1 else []
    # product forms: coefficient evaluation of W near its multiple roots
    # loses most digits
    ts = [complex(t) for t in ts]
    zs = [complex(z) for z in zs]
    lc = complex(Wc.lc)
    a, b, rel = [], [], []
    for i, t in enumerate(ts):
        others = [s for j, s in enumerate(ts) if j != i]
        f1 = complex(np.prod([t - s for s in others])) if others else 1.0 + 0j
        w0 = lc * complex(np.prod([t - z for z in zs])) if zs else lc
        ratio = sum(1 / (t - z) for z in zs) - sum(2 / (t - s) for s in others)
        b.append(w0 / f1**2)
        a.append(ratio * w0 / f1**2)
        size = sum(1 / abs(t - z) for z in zs) + sum(2 / abs(t - s) for s in others)
        rel.append(abs(ratio) / size if size else 0.0)
    return list(ts), a, b, rel


def _canonical_partner(G: pc.Poly, F: pc.Poly) -> pc.Poly:
    G = G.monic()
    k = F.degree
    if G.degree > k:
        G = G - F.scale(G.coeff(k))
    return G


def _partner_exact(W: pc.Poly, F: pc.Poly) -> pc.Poly:
    k = F.degree
    b = W.degree + 1 - k
    if b <= k:
        raise ResidueObstruction(f"no partner of degree > {k} for deg W = {W.degree}")
    unknowns = [j for j in range(b) if j != k]
    target = W.scale(Fraction(k - b))
    Fp = F.derivative()
    # F'G - FG' is linear in G; column for each free coefficient
    def image(g: pc.Poly) -> pc.Poly:
        return Fp * g - F * g.derivative()

    cols = [image(pc.Poly.monomial(j, 1, pc.RATIONAL)) for j in unknowns]
    rhs_poly = target - image(pc.Poly.monomial(b, 1, pc.RATIONAL))
    n_eq = W.degree + b
    matrix = [[col.coeff(r) for col in cols] for r in range(n_eq)]
    rhs = [rhs_poly.coeff(r) for r in range(n_eq)]
    sol = exact.solve(matrix, rhs)
    if sol is None:
        raise ResidueObstruction("the roots of F do not solve the Bethe system")
    coeffs = [Fraction(0)] * (b + 1)
    for j, c in zip(unknowns, sol):
        coeffs[j] = c
    coeffs[b] = Fraction(1)
    return pc.Poly(tuple(coeffs), pc.RATIONAL)


def recover_partner(W: pc.Poly, F: pc.Poly, tol: float = OBSTRUCTION_TOL, w_roots=None) -> pc.Poly:
    """The canonical ``G`` with ``Wr(F, G) = W``: monic, no ``x^(deg F)`` term.

    ``w_roots`` (the roots of ``W``) skips the root finder on ``W``,
    whose roots are usually multiple; list each root by its multiplicity.
    """
    if W.kind != F.kind:
        raise pc.KindMismatch("W and F must share a scalar kind")
    F = F.monic()
    W = W.monic()
    if F.degree == 0:
        return _canonical_partner(W.integral(), F)
    if F.kind == pc.RATIONAL:
        if pc.resultant(W, F) == 0:
            raise SharedRoot("F and W have a common root")
        return _partner_exact(W, F)
    ts = pc.roots(F)
    if w_roots is not None:
        zs = [complex(z) for z in w_roots]
    else:
        zs = pc.roots(W) if W.degree >= 1 else []
    if any(abs(t - z) <= 1e-9 * (1 + abs(z)) for t in ts for z in zs):
        raise SharedRoot("F and W have a common root")
    ts, a, b, rel = residue_data(W, F, ts, zs)
    if max(rel) > tol:
        raise ResidueObstruction(f"simple-pole residues do not vanish (max relative {max(rel):.3e})")
    Q = W // (F * F)
    G = -(F * Q.integral())
    for t, bi in zip(ts, b):
        G = G + _deflate(F, t).scale(bi)
    return _canonical_partner(G.trimmed(), F)


def ode_coefficients(W: pc.Poly, F: pc.Poly) -> pc.Poly:
    """``h`` in ``W u'' - W' u' + h u = 0``: ``h = (W'F' - WF'') / F``."""
    num = W.derivative() * F.derivative() - W * F.derivative(2)
    if num.is_zero():
        return pc.Poly.zero(W.kind)
    return num.exact_quotient(F, rtol=1e-8)


def apply_ode(W: pc.Poly, h: pc.Poly, u: pc.Poly) -> pc.Poly:
    return W * u.derivative(2) - W.derivative() * u.derivative() + h * u


# ---- the correspondence ---------------------------------------------------

def _exact_orbit(p: MasterProblem, orbit: BetheOrbit) -> bool:
    return all(isinstance(x, Rational) for x in p.z) and all(isinstance(x, Rational) for x in orbit.t)


def plane_from_orbit(p: MasterProblem, orbit: BetheOrbit) -> PolyPlane:
    exact_kind = _exact_orbit(p, orbit)
    kind = pc.RATIONAL if exact_kind else pc.COMPLEX
    ts = [Fraction(x) for x in orbit.t] if exact_kind else [complex(x) for x in orbit.t]
    F = pc.from_roots(ts, kind)
    W = p.wronskian_target(kind)
    G = recover_partner(W, F, w_roots=[z for z, m in zip(p.z, p.M) for _ in range(m)])
    return PolyPlane.span([G, F])


def orbit_from_plane(V: PolyPlane, p: MasterProblem, collision_tol: float = 1e-6) -> BetheOrbit:
    """Roots of the smaller-degree basis polynomial, checked against nondegeneracy."""
    if V.p != 2:
        raise DegeneratePlane("expected a 2-plane")
    F = V.smallest()
    if F.degree != p.k:
        raise DegeneratePlane(f"smaller degree {F.degree} != k = {p.k}")
    if F.degree == 0:
        return make_orbit(p, ())
    if F.kind == pc.RATIONAL and pc.discriminant(F) == 0:
        raise DegeneratePlane("F has a multiple root")
    ts = pc.roots(F.as_complex())
    for i, t in enumerate(ts):
        if any(abs(t - complex(z)) <= collision_tol for z in p.z):
            raise DegeneratePlane("a root of F collides with a marked point")
        if any(abs(t - s) <= collision_tol for s in ts[i + 1:]):
            raise DegeneratePlane("F has a multiple root")
    return make_orbit(p, ts)


# ---- rational-curve projection -------------------------------------------

def annihilator(V: PolyPlane, d: int | None = None) -> list:
    """Basis of vectors ``kappa`` with ``sum_c row[c] kappa[c] = 0`` for every basis row."""
    rows = V.coefficient_rows(d)
    width = len(rows[0])
    if V.kind == pc.RATIONAL:
        return exact.nullspace(exact.dense_to_sparse(rows), width)
    a = np.array([[complex(x) for x in r] for r in rows])
    _, s, vh = np.linalg.svd(a)
    return [list(v.conj()) for v in vh[len(V.basis):]]


def _curve_matrix(xi, p: int, d: int, kappa: list) -> list:
    rows = []
    for order in range(p):
        row = []
        for c in range(d + 1):
            e = d - c
            if e < order:
                row.append(0 * xi)
            else:
                coef = 1
                for s in range(order):
                    coef *= e - s
                row.append(coef * xi ** (e - order))
        rows.append(row)
    return rows + [list(v) for v in kappa]


def curve_projection(V: PolyPlane, d: int | None = None) -> pc.Poly:
    """Monic ``det[F(xi); F'(xi); ...; F^(p-1)(xi); K_V]`` with ``F(xi) = (xi^d, ..., 1)``.

    The determinant is a polynomial of degree at most ``p d``; it is recovered
    from exact values at ``0..p d`` (rational kind) or from values at roots of
    unity (complex kind).
    """
    d = V.ambient_degree if d is None else d
    p = V.p
    kappa = annihilator(V, d)
    N = p * d + 1
    if V.kind == pc.RATIONAL:
        xs = [Fraction(i) for i in range(N)]
        vals = [exact.det(_curve_matrix(x, p, d, kappa)) for x in xs]
        vander = [[x**j for j in range(N)] for x in xs]
        coeffs = exact.solve(vander, vals)
        poly = pc.Poly(tuple(coeffs), pc.RATIONAL)
    else:
        xs = np.exp(2j * np.pi * np.arange(N) / N)
        vals = np.array([np.linalg.det(np.array(_curve_matrix(complex(x), p, d, kappa), dtype=complex)) for x in xs])
        # v_s = sum_j c_j w^(js)  =>  c_j = fft(v)_j / N
        coeffs = np.fft.fft(vals) / N
        poly = pc.Poly(tuple(complex(c) for c in coeffs), pc.COMPLEX).trimmed(1e-10)
    return poly.monic()


# ---- local structure ------------------------------------------------------

def osculating_exponents(V: PolyPlane, x0=0) -> tuple:
    """Orders of vanishing at ``x0`` realized by elements of ``V``, ascending.

    Computed by echelonizing the Taylor coefficients at ``x0`` from the lowest
    order up; the pivot positions are the exponents.
    """
    tay = [b.taylor(x0) for b in V.basis]
    width = max(t.degree for t in tay) + 1
    rows = [[t.coeff(c) for c in range(width)] for t in tay]
    if V.kind == pc.RATIONAL:
        return tuple(sorted(exact.rref(exact.dense_to_sparse(rows))))
    _, piv = _rref_complex(np.array([[complex(x) for x in r] for r in rows]))
    return tuple(piv)


def lowest_vanishing_element(V: PolyPlane, x0=0) -> pc.Poly:
    """An element of ``V`` of maximal order of vanishing at ``x0`` (exact kind)."""
    if V.kind != pc.RATIONAL:
        raise ValueError("exact planes only")
    tay = [b.taylor(x0) for b in V.basis]
    width = max(t.degree for t in tay) + 1
    rows = [[t.coeff(c) for c in range(width)] + [Fraction(int(i == j)) for j in range(V.p)] for i, t in enumerate(tay)]
    red = exact.rref(exact.dense_to_sparse(rows))
    last = max(c for c in red if c < width)
    comb = red[last]
    out = pc.Poly.zero(pc.RATIONAL)
    for j, b in enumerate(V.basis):
        out = out + b.scale(comb.get(width + j, Fraction(0)))
    return out.monic()
