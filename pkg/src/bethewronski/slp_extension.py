"""The sl_p master function, Wronskian towers and the n = 2 Fuchsian reduction.

Variables come in levels ``t^(1), ..., t^(p-1)`` with ``k_l`` points each.
The master function is

    prod_l prod_{i<j} (t^(l)_i - t^(l)_j)^2
      * prod_{l>=2} prod_{i,j} (t^(l-1)_i - t^(l)_j)^(-1)
      * prod_j prod_i (t^(1)_i - z_j)^(-m_j),

and its critical system (minus the log-gradient) pairs every variable with
the Cartan coupling ``2`` on its own level and ``-1`` on adjacent levels.
Empty levels contribute empty products.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

import numpy as np

from . import exact
from . import polynomial_core as pc
from .bethe_sl2 import (
    MasterProblem,
    SolverConfig,
    SolverWarning,
    multiset_distance,
    newton_batch,
)
from .errors import CoincidingPoints, OnDiagonal
from .wronski_map import PolyPlane, recover_partner


class BlockTooLarge(ValueError):
    pass


class ReconstructionFailed(ValueError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ReductionFailed(ValueError):
    pass


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Rational)) for v in values)


@dataclass(frozen=True)
class SlpProblem:
    p: int
    M: tuple
    z: tuple
    k: tuple

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("p must be at least 2")
        M = tuple(int(m) for m in self.M)
        k = tuple(int(x) for x in self.k)
        if len(k) != self.p - 1:
            raise ValueError(f"need {self.p - 1} level counts, got {len(k)}")
        if any(a < b for a, b in zip(k, k[1:])) or (k and k[-1] < 0):
            raise ValueError(f"level counts must satisfy k_1 >= ... >= k_(p-1) >= 0, got {k}")
        if len(M) != len(self.z) or any(m <= 0 for m in M):
            raise ValueError("need one positive weight per point")
        z = tuple(Fraction(x) if isinstance(x, (int, Rational)) else complex(x) for x in self.z)
        if len(set(z)) != len(z):
            raise CoincidingPoints("marked points must be pairwise distinct")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "z", z)

    @property
    def K(self) -> int:
        return sum(self.k)

    @property
    def total(self) -> int:
        return sum(self.M)

    @property
    def n(self) -> int:
        return len(self.M)

    def levels(self) -> list:
        """Level index (1-based) of every variable in the flattened order."""
        return [l + 1 for l, kl in enumerate(self.k) for _ in range(kl)]

    def split(self, flat: Sequence) -> tuple:
        out, pos = [], 0
        for kl in self.k:
            out.append(tuple(flat[pos:pos + kl]))
            pos += kl
        return tuple(out)

    def degrees(self) -> tuple:
        """Type ``D``: ``d_l = k_(l-1) - k_l + p - l`` with ``k_0 = |M|`` and ``k_p = 0``."""
        ks = (self.total,) + self.k + (0,)
        return tuple(ks[l - 1] - ks[l] + self.p - l for l in range(1, self.p + 1))

    def sl2(self) -> MasterProblem:
        if any(self.k[1:]):
            raise ValueError("only problems with k_2 = ... = 0 reduce to sl_2")
        return MasterProblem(self.M, self.z, self.k[0])

    def wronskian_target(self, kind=None) -> pc.Poly:
        return MasterProblem(self.M, self.z, 0).wronskian_target(kind)


def coupling(levels: Sequence[int]) -> np.ndarray:
    """Cartan coupling between flattened variables (diagonal zero)."""
    lv = np.array(levels)
    C = np.where(lv[:, None] == lv[None, :], 2.0, 0.0)
    C = np.where(np.abs(lv[:, None] - lv[None, :]) == 1, -1.0, C)
    np.fill_diagonal(C, 0.0)
    return C


def _check_configuration(p: SlpProblem, levels: tuple):
    for l, tl in enumerate(levels):
        for i, a in enumerate(tl):
            if l == 0 and any(a == zj for zj in p.z):
                raise OnDiagonal(f"t^(1)_{i} coincides with a marked point")
            if any(a == b for b in tl[i + 1:]):
                raise OnDiagonal(f"two level-{l + 1} points coincide")
            if l + 1 < len(levels) and any(a == b for b in levels[l + 1]):
                raise OnDiagonal(f"levels {l + 1} and {l + 2} share a point")


def _as_levels(p: SlpProblem, t) -> tuple:
    levels = tuple(tuple(x) for x in t)
    if tuple(len(x) for x in levels) != p.k:
        raise ValueError(f"level sizes {[len(x) for x in levels]} != k = {list(p.k)}")
    return levels


def slp_master_value(p: SlpProblem, t):
    """Direct product form; exact when every input is rational."""
    levels = _as_levels(p, t)
    _check_configuration(p, levels)
    flat = [x for lv in levels for x in lv]
    exact_kind = _is_exact(p.z) and _is_exact(flat)
    conv = Fraction if exact_kind else complex
    levels = [[conv(x) for x in lv] for lv in levels]
    z = [conv(x) for x in p.z]
    val = conv(1)
    for lv in levels:
        for i in range(len(lv)):
            for j in range(i + 1, len(lv)):
                val *= (lv[i] - lv[j]) ** 2
    for l in range(1, len(levels)):
        for a in levels[l - 1]:
            for b in levels[l]:
                val /= a - b
    if levels:
        for a in levels[0]:
            for zj, mj in zip(z, p.M):
                val /= (a - zj) ** mj
    return val


def slp_master_value_discres(p: SlpProblem, t):
    """``prod Disc(W_l) / ((-1)^(k_1 |M|) Res(W, W_1) prod Res(W_(l-1), W_l))``."""
    levels = _as_levels(p, t)
    flat = [x for lv in levels for x in lv]
    kind = pc.RATIONAL if _is_exact(p.z) and _is_exact(flat) else pc.COMPLEX
    conv = Fraction if kind == pc.RATIONAL else complex
    Ws = [pc.from_roots([conv(x) for x in lv], kind) for lv in levels]
    one = conv(1)
    num = one
    for Wl in Ws:
        if Wl.degree >= 1:
            num *= pc.discriminant(Wl)
    den = pc.resultant(p.wronskian_target(kind), Ws[0]) * (-1 if (p.k[0] * p.total) % 2 else 1)
    for a, b in zip(Ws, Ws[1:]):
        den *= pc.resultant(a, b)
    return num / den


def _residual_batch(t, z, m, field_mask, C):
    dz = t[:, :, None] - z[None, None, :]
    r = (m[None, None, :] / dz).sum(axis=2) * field_mask[None, :]
    K = t.shape[1]
    if K > 1:
        dt = t[:, :, None] - t[:, None, :]
        idx = np.arange(K)
        dt[:, idx, idx] = 1.0
        r = r - (C[None] / dt).sum(axis=2)
    return r


def _jacobian_batch(t, z, m, field_mask, C):
    B, K = t.shape
    dz = t[:, :, None] - z[None, None, :]
    diag = -(m[None, None, :] / dz**2).sum(axis=2) * field_mask[None, :]
    J = np.zeros((B, K, K), dtype=complex)
    idx = np.arange(K)
    if K > 1:
        dt = t[:, :, None] - t[:, None, :]
        dt[:, idx, idx] = 1.0
        off = C[None] / dt**2
        J = -off
        diag = diag + off.sum(axis=2)
    J[:, idx, idx] = diag
    return J


def _field(p: SlpProblem) -> np.ndarray:
    return np.array([1.0 if l == 1 else 0.0 for l in p.levels()])


def slp_residual(p: SlpProblem, t) -> tuple:
    """Per-level components of ``-d log Phi``; exact lists or complex arrays."""
    levels = _as_levels(p, t)
    _check_configuration(p, levels)
    flat = [x for lv in levels for x in lv]
    lv_idx = p.levels()
    if _is_exact(p.z) and _is_exact(flat):
        C = coupling(lv_idx)
        flat = [Fraction(x) for x in flat]
        out = []
        for a, ta in enumerate(flat):
            r = Fraction(0)
            if lv_idx[a] == 1:
                r += sum(Fraction(mj) / (ta - zj) for zj, mj in zip(p.z, p.M))
            for b, tb in enumerate(flat):
                if b != a and C[a, b]:
                    r -= Fraction(int(C[a, b])) / (ta - tb)
            out.append(r)
        return p.split(out)
    arr = np.array([complex(x) for x in flat])
    z = np.array([complex(x) for x in p.z])
    r = _residual_batch(arr[None, :], z, np.array(p.M, float), _field(p), coupling(lv_idx))[0]
    return p.split(list(r))


def slp_log_gradient_contour(p: SlpProblem, t, points: int = 16) -> tuple:
    """Log-gradient of the product form by Cauchy-contour differentiation."""
    levels = [list(map(complex, lv)) for lv in _as_levels(p, t)]
    base = slp_master_value(p, levels)
    z = [complex(x) for x in p.z]
    out = []
    for l, lv in enumerate(levels):
        comp = []
        for i, a in enumerate(lv):
            others = [b for j, b in enumerate(lv) if j != i]
            if l == 0:
                others += z
            if l > 0:
                others += levels[l - 1]
            if l + 1 < len(levels):
                others += levels[l + 1]
            r = 1e-2 * min((abs(a - o) for o in others), default=1.0)
            acc = 0j
            for s in range(points):
                w = np.exp(2j * np.pi * s / points)
                shifted = [list(x) for x in levels]
                shifted[l][i] = a + r * w
                acc += slp_master_value(p, shifted) / w
            comp.append(acc / (points * r) / base)
        out.append(comp)
    return tuple(out)


# ---- leveled solver -------------------------------------------------------

@dataclass(frozen=True)
class SlpOrbit:
    levels: tuple
    residual: float = 0.0
    hessian_min_sv: float = math.inf
    hessian_norm: float = 0.0

    @property
    def hessian_relative_sv(self) -> float:
        return math.inf if self.hessian_norm == 0 else self.hessian_min_sv / self.hessian_norm

    def flat(self) -> list:
        return [x for lv in self.levels for x in lv]


def level_distance(a: SlpOrbit, b: SlpOrbit) -> float:
    return max((multiset_distance(x, y) for x, y in zip(a.levels, b.levels)), default=0.0)


def _canonical_levels(levels) -> tuple:
    key = lambda x: (round(x.real, 8), round(x.imag, 8))
    return tuple(tuple(sorted((complex(v) for v in lv), key=key)) for lv in levels)


def _scale(p: SlpProblem) -> tuple:
    z = np.array([complex(x) for x in p.z])
    centre = z.mean()
    s = float(np.max(np.abs(z - centre))) if len(z) > 1 else 1.0
    return centre, s or 1.0


def make_slp_orbit(p: SlpProblem, levels) -> SlpOrbit:
    levels = _canonical_levels(levels)
    flat = np.array([x for lv in levels for x in lv])
    if flat.size == 0:
        return SlpOrbit(levels, 0.0, math.inf, 0.0)
    _, s = _scale(p)
    z = np.array([complex(x) for x in p.z])
    args = (z, np.array(p.M, float), _field(p), coupling(p.levels()))
    res = float(np.max(np.abs(_residual_batch(flat[None, :], *args)[0]))) * s
    sv = np.linalg.svd(_jacobian_batch(flat[None, :], *args)[0], compute_uv=False) * s * s
    return SlpOrbit(levels, res, float(sv[-1]), float(sv[0]))


def _slp_starts(rng, count, p: SlpProblem, z: np.ndarray, strategy: str) -> np.ndarray:
    """Level 1 in gaps between marked points, level ``l`` in gaps of level ``l-1``.

    ``"wide"`` uses a large imaginary jitter, which helps reach orbits made of
    conjugate pairs; ``"disk"`` ignores the structure altogether.
    """
    if strategy == "disk":
        k = p.K
        r = 2 * max(1.0, float(np.max(np.abs(z)))) * np.sqrt(rng.uniform(size=(count, k)))
        return r * np.exp(1j * rng.uniform(0, 2 * np.pi, size=(count, k)))
    cols = []
    anchors = np.repeat(z[None, :], count, axis=0)
    for kl in p.k:
        if kl == 0:
            break
        a = np.sort_complex(anchors)
        width = a.shape[1]
        if width >= 2:
            g = rng.integers(0, width - 1, size=(count, kl))
            lo = np.take_along_axis(a, g, axis=1)
            hi = np.take_along_axis(a, g + 1, axis=1)
        else:
            lo = a[:, :1].repeat(kl, axis=1)
            hi = lo + 1.0
        u = rng.uniform(0.05, 0.95, size=(count, kl))
        spread = 0.3 if strategy == "wide" else 0.02
        jitter = spread * (rng.normal(size=(count, kl)) + 1j * rng.normal(size=(count, kl)))
        lvl = lo + u * (hi - lo) + jitter * (np.abs(hi - lo) + 1e-3)
        cols.append(lvl)
        # next level sits between this level's points and their outer neighbours
        anchors = np.concatenate([lvl, anchors[:, :1] - 1, anchors[:, -1:] + 1], axis=1)
    return np.concatenate(cols, axis=1)


@dataclass
class SlpSolveResult:
    orbits: list
    expected: int
    starts_used: int
    budget: int
    budget_exhausted: bool = False
    parasite: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return len(self.orbits) == self.expected


def _admissible(p: SlpProblem, flat: np.ndarray, zn: np.ndarray, tol: float) -> bool:
    if not np.all(np.isfinite(flat)):
        return False
    levels = p.split(list(flat))
    if levels and levels[0] and np.min(np.abs(np.array(levels[0])[:, None] - zn[None, :])) <= tol:
        return False
    for l, lv in enumerate(levels):
        lv = np.array(lv)
        if len(lv) > 1 and np.min(np.abs(lv[:, None] - lv[None, :]) + np.eye(len(lv)) * 1e300) <= tol:
            return False
        if l + 1 < len(levels) and len(lv) and len(levels[l + 1]):
            if np.min(np.abs(lv[:, None] - np.array(levels[l + 1])[None, :])) <= tol:
                return False
    return True


def _relative_residual(flat, zn, m, fm, C) -> float:
    K = len(flat)
    scale = np.abs(m[None, :] / (flat[:, None] - zn[None, :])).sum(axis=1) * fm
    if K > 1:
        d = flat[:, None] - flat[None, :] + np.eye(K)
        scale = scale + np.abs(C / d).sum(axis=1)
    r = _residual_batch(flat[None, :], zn, m, fm, C)[0]
    return float(np.max(np.abs(r) / np.where(scale > 0, scale, 1.0)))


def solve_slp(p: SlpProblem, cfg: SolverConfig | None = None, expected: int | None = None) -> SlpSolveResult:
    """Multistart damped Newton on the leveled critical system."""
    cfg = cfg or SolverConfig()
    if expected is None:
        expected = slp_dim_sing(p)
    if p.K == 0:
        return SlpSolveResult([make_slp_orbit(p, [() for _ in p.k])], expected, 0, 0)
    rng = np.random.default_rng(cfg.seed)
    centre, s = _scale(p)
    zn = (np.array([complex(x) for x in p.z]) - centre) / s
    m = np.array(p.M, float)
    fm = _field(p)
    C = coupling(p.levels())
    F = lambda t: _residual_batch(t, zn, m, fm, C)
    Jac = lambda t: _jacobian_batch(t, zn, m, fm, C)
    budget = cfg.max_starts or cfg.budget_factor * max(1, expected)
    if cfg.exhaustive:
        budget *= cfg.exhaustive_factor
    found: list[SlpOrbit] = []
    used = rejected = 0
    strategies = ("gaps", "wide", "gaps", "disk")
    batch_no = 0
    while used < budget:
        count = min(cfg.batch, budget - used)
        t0 = _slp_starts(rng, count, p, zn, strategies[batch_no % len(strategies)])
        batch_no += 1
        used += count
        t, _, rn = newton_batch(F, Jac, t0, cfg.newton_iters, 1e-3 * cfg.tol)
        for row, norm in zip(t, rn):
            if not (np.isfinite(norm) and norm < cfg.tol):
                continue
            if not _admissible(p, row, zn, cfg.collision_tol) or _relative_residual(row, zn, m, fm, C) > cfg.relative_tol:
                rejected += 1
                continue
            orbit = make_slp_orbit(p, p.split(list(row * s + centre)))
            if orbit.residual >= cfg.tol:
                continue
            if all(level_distance(orbit, o) > cfg.dedup_tol for o in found):
                found.append(orbit)
        if not cfg.exhaustive and expected > 0 and len(found) >= expected:
            break
    key = lambda o: [(round(x.real, 8), round(x.imag, 8)) for x in o.flat()]
    found.sort(key=key)
    res = SlpSolveResult(found, expected, used, budget, diagnostics={"rejected": rejected})
    if len(found) < expected:
        res.budget_exhausted = True
        warnings.warn(f"found {len(found)} of {expected} sl_p orbits", SolverWarning)
    res.parasite = len(found) > expected
    return res


# ---- Wronskian towers -----------------------------------------------------

@dataclass(frozen=True)
class WrTower:
    levels: tuple  # monic Wr_0, ..., Wr_(p-1)
    nondegenerate: bool

    @property
    def degrees(self) -> tuple:
        return tuple(w.degree for w in self.levels)


def degree_law(D: Sequence[int]) -> tuple:
    """``k_l = d_p + ... + d_(l+1) - (p-l)(p-l-1)/2`` for ``0 <= l <= p-1``."""
    p = len(D)
    return tuple(sum(D[l:]) - (p - l) * (p - l - 1) // 2 for l in range(p))


def _coprime(a: pc.Poly, b: pc.Poly, tol: float = 1e-8) -> bool:
    if a.degree == 0 or b.degree == 0:
        return True
    if a.kind == pc.RATIONAL:
        return pc.resultant(a, b) != 0
    ra, rb = pc.roots(a), pc.roots(b)
    return min(abs(x - y) for x in ra for y in rb) > tol


def wr_tower(V: PolyPlane) -> WrTower:
    basis = list(V.basis)
    levels = tuple(pc.wronskian_p(basis[l:]) for l in range(V.p))
    nondeg = all(_coprime(a, b) for a, b in zip(levels, levels[1:]))
    return WrTower(levels, nondeg)


def _solve_linear(cols: list, rhs: pc.Poly, kind: str, n_eq: int):
    if kind == pc.RATIONAL:
        mat = [[c.coeff(r) for c in cols] for r in range(n_eq)]
        return exact.solve(mat, [rhs.coeff(r) for r in range(n_eq)]), 0.0
    A = np.array([[complex(c.coeff(r)) for c in cols] for r in range(n_eq)])
    b = np.array([complex(rhs.coeff(r)) for r in range(n_eq)])
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = float(np.linalg.norm(A @ x - b) / max(np.linalg.norm(b), 1e-300))
    return list(x), resid


def plane_from_slp_orbit(p: SlpProblem, orbit, tol: float = 1e-8) -> PolyPlane:
    """The unique plane whose Wronskian tower has ``Wr_l`` vanishing at ``t^(l)``.

    ``P_p = W_(p-1)``; each higher ``P_(l+1)`` is monic of degree ``d_(l+1)``
    with zero coefficients at the lower pivot degrees and is found from the
    linear condition ``Wr[P_(l+1), ..., P_p] = lambda W_l``.
    """
    levels = orbit.levels if isinstance(orbit, SlpOrbit) else tuple(tuple(x) for x in orbit)
    flat = [x for lv in levels for x in lv]
    exact_kind = _is_exact(p.z) and _is_exact(flat)
    kind = pc.RATIONAL if exact_kind else pc.COMPLEX
    conv = Fraction if exact_kind else complex
    Ws = [p.wronskian_target(kind)] + [pc.from_roots([conv(x) for x in lv], kind) for lv in levels]
    D = p.degrees()
    basis = [Ws[p.p - 1]]
    for l in range(p.p - 2, -1, -1):
        d_new = D[l]
        pivots = {b.degree for b in basis}
        free = [c for c in range(d_new) if c not in pivots]
        image = lambda q: pc.wronskian_det([q] + basis)
        cols = [image(pc.Poly.monomial(c, 1, kind)) for c in free] + [-Ws[l]]
        rhs = -image(pc.Poly.monomial(d_new, 1, kind))
        n_eq = max([c.degree for c in cols] + [rhs.degree]) + 1
        sol, resid = _solve_linear(cols, rhs, kind, n_eq)
        if sol is None or resid > tol:
            raise ReconstructionFailed(
                f"no degree-{d_new} polynomial completes level {l}",
                {"level": l, "residual": resid},
            )
        coeffs = [conv(0)] * (d_new + 1)
        for c, v in zip(free, sol):
            coeffs[c] = v
        coeffs[d_new] = conv(1)
        basis.insert(0, pc.Poly(tuple(coeffs), kind))
    V = PolyPlane.span(basis)
    tower = wr_tower(V)
    W = p.wronskian_target(kind)
    if pc.rel_distance(tower.levels[0], W) > tol:
        raise ReconstructionFailed("Wronskian of the reconstructed plane differs from W",
                                   {"distance": pc.rel_distance(tower.levels[0], W)})
    return V


def slp_orbit_from_plane(V: PolyPlane, p: SlpProblem) -> SlpOrbit:
    tower = wr_tower(V)
    levels = []
    for w in tower.levels[1:]:
        levels.append(tuple(pc.roots(w.as_complex())) if w.degree >= 1 else ())
    return make_slp_orbit(p, levels)


def slp_orbit_plane_roundtrip(p: SlpProblem, orbit: SlpOrbit, tol: float = 1e-6):
    """orbit -> plane -> orbit; returns ``(plane, recovered orbit, level distance)``."""
    V = plane_from_slp_orbit(p, orbit)
    back = slp_orbit_from_plane(V, p)
    dist = level_distance(orbit, back)
    if dist > tol:
        raise ReconstructionFailed("tower roots differ from the orbit", {"distance": dist})
    return V, back, dist


# ---- exact singular-vector dimensions ------------------------------------

@lru_cache(maxsize=None)
def _monomials(m: int, p: int) -> tuple:
    """Exponent vectors of degree-``m`` monomials in ``p`` letters."""
    if p == 1:
        return ((m,),)
    return tuple((a,) + rest for a in range(m, -1, -1) for rest in _monomials(m - a, p - 1))


def letter_counts(p: SlpProblem) -> tuple:
    """Total letter content of the weight block: ``c_1 = |M| - k_1``, ``c_l = k_(l-1) - k_l``, ``c_p = k_(p-1)``."""
    ks = (p.total,) + p.k + (0,)
    return tuple(ks[l] - ks[l + 1] for l in range(p.p))


def weight_block(M: Sequence[int], counts: Sequence[int], cap: int | None = None) -> list:
    """Tensor basis elements (tuples of monomials) with the given letter content."""
    pdim = len(counts)
    out = []

    def rec(i, remaining, acc):
        if cap is not None and len(out) > cap:
            raise BlockTooLarge(f"weight block exceeds {cap} elements")
        if i == len(M):
            if not any(remaining):
                out.append(tuple(acc))
            return
        for mono in _monomials(M[i], pdim):
            if all(a <= r for a, r in zip(mono, remaining)):
                acc.append(mono)
                rec(i + 1, tuple(r - a for r, a in zip(remaining, mono)), acc)
                acc.pop()

    rec(0, tuple(counts), [])
    if cap is not None and len(out) > cap:
        raise BlockTooLarge(f"weight block has {len(out)} > {cap} elements")
    return out


def raise_letter(i: int, elem: tuple):
    """``e_i`` on a tensor basis element: each factor turns one letter ``i+1`` into ``i``."""
    for f, mono in enumerate(elem):
        a = mono[i + 1]
        if a:
            new = list(mono)
            new[i] += 1
            new[i + 1] -= 1
            yield a, elem[:f] + (tuple(new),) + elem[f + 1:]


def slp_dim_sing(p: SlpProblem, cap: int = 2000) -> int:
    """Exact dimension of the joint kernel of ``e_1..e_(p-1)`` on the weight block."""
    counts = letter_counts(p)
    if any(c < 0 for c in counts):
        return 0
    block = weight_block(p.M, counts, cap)
    if not block:
        return 0
    rows: dict = {}
    for c, elem in enumerate(block):
        for i in range(p.p - 1):
            for coef, img in raise_letter(i, elem):
                rows.setdefault((i, img), {})[c] = rows.get((i, img), {}).get(c, 0) + coef
    return len(block) - exact.rank(list(rows.values()))


# ---- Fuchsian reduction ---------------------------------------------------

@dataclass(frozen=True)
class FuchsianForm:
    coefficients: tuple  # polynomial coefficient of u^(r), r = 0..p, after normalization
    A: Fraction
    B: Fraction
    C: Fraction
    p: int


def ode_from_plane(V: PolyPlane) -> tuple:
    """Coefficients ``c_r`` of ``u^(r)`` in ``det[u, P_1, ..., P_p]`` (Wronski matrix of the column)."""
    basis = list(V.basis)
    pp = V.p
    derivs = [[b.derivative(r) for b in basis] for r in range(pp + 1)]
    coeffs = []
    for r in range(pp + 1):
        rows = [derivs[s] for s in range(pp + 1) if s != r]
        # the minor is a Wronski-type determinant with one skipped order
        minor = _poly_det(rows, V.kind)
        coeffs.append(minor if r % 2 == 0 else -minor)
    return tuple(coeffs)


def _poly_det(rows: list, kind: str) -> pc.Poly:
    n = len(rows)
    partial = {0: pc.Poly.constant(1, kind)}
    for i in range(n):
        nxt: dict = {}
        for mask, val in partial.items():
            for c in range(n):
                if mask & (1 << c) or rows[i][c].is_zero():
                    continue
                term = val * rows[i][c]
                if bin(mask >> (c + 1)).count("1") % 2:
                    term = -term
                nm = mask | (1 << c)
                nxt[nm] = nxt[nm] + term if nm in nxt else term
        partial = nxt
    return partial.get((1 << n) - 1, pc.Poly.zero(kind))


def fuchsian_reduce(V: PolyPlane) -> FuchsianForm:
    """Normalize the plane's ODE to ``x(x-1) u^(p) + (Ax+B) u^(p-1) + C u^(p-2) = 0``.

    Exact planes only; every check is an exact zero test.  For ``p = 2`` the
    ``u^(p-2)`` term is the ``u`` term itself.
    """
    if V.kind != pc.RATIONAL:
        raise ReductionFailed("the reduction is checked in exact arithmetic only")
    pp = V.p
    cs = ode_from_plane(V)
    lead = cs[pp]
    xx1 = pc.Poly((0, -1, 1), pc.RATIONAL)
    norm = []
    for c in cs:
        q, r = (c * xx1).divmod(lead)
        if r:
            raise ReductionFailed("ODE coefficients are not polynomial after normalization")
        norm.append(q)
    for r in range(pp - 2):
        if not norm[r].is_zero():
            raise ReductionFailed(f"coefficient of u^({r}) does not vanish")
    ab, c = norm[pp - 1], norm[pp - 2]
    if ab.degree > 1 or c.degree > 0:
        raise ReductionFailed("surviving coefficients are not of the form Ax+B, C")
    return FuchsianForm(tuple(norm), ab.coeff(1), ab.coeff(0), c.coeff(0), pp)


def indicial_polynomial(coefficients: Sequence[pc.Poly], x0) -> pc.Poly:
    """Indicial polynomial in ``rho`` at a regular singular point ``x0``."""
    shifted = [c.taylor(x0) for c in coefficients]
    orders = [(c.valuation(0) - r) if not c.is_zero() else None for r, c in enumerate(shifted)]
    low = min(o for o in orders if o is not None)
    rho = pc.x_poly(pc.RATIONAL)
    out = pc.Poly.zero(pc.RATIONAL)
    for r, (c, o) in enumerate(zip(shifted, orders)):
        if o == low:
            falling = pc.Poly.constant(1)
            for s in range(r):
                falling = falling * (rho - pc.Poly.constant(s))
            out = out + falling.scale(c.coeff(c.valuation(0)))
    return out


def integer_roots(f: pc.Poly) -> list:
    """Integer roots with multiplicity; raises if some root is not an integer."""
    roots = []
    bound = 1 + int(max(abs(c) for c in f.monic().coeffs[:-1]) if f.degree else 0)
    g = f
    for cand in range(-bound, bound + 1):
        lin = pc.Poly((-cand, 1), pc.RATIONAL)
        while g.degree >= 1 and g(cand) == 0:
            g, _ = g.divmod(lin)
            roots.append(cand)
    if g.degree >= 1:
        raise ReductionFailed(f"indicial polynomial has non-integer roots: {g}")
    return sorted(roots)


def exponents(form: FuchsianForm, x0) -> list:
    return integer_roots(indicial_polynomial(form.coefficients, x0))


def sl2_exact_plane(m1: int, m2: int, k: int):
    """Exact 2-plane with Wronskian ``x^m1 (x-1)^m2`` whose smaller polynomial has degree ``k``.

    For two points the Bethe polynomial ``F`` solves
    ``x(x-1)F'' - (m1(x-1) + m2 x)F' + h F = 0`` with the constant
    ``h = k(m1 + m2 - k + 1)``, which is a triangular linear system.
    """
    W = pc.Poly((0, 1), pc.RATIONAL) ** m1 * pc.Poly((-1, 1), pc.RATIONAL) ** m2
    h = Fraction(k * (m1 + m2 - k + 1))
    x = pc.x_poly()
    xx1 = x * (x - pc.Poly.constant(1))
    lin = x.scale(m1 + m2) - pc.Poly.constant(m1)
    cols = []
    for j in range(k):
        e = pc.Poly.monomial(j)
        cols.append(xx1 * e.derivative(2) - lin * e.derivative() + e.scale(h))
    top = pc.Poly.monomial(k)
    rhs = -(xx1 * top.derivative(2) - lin * top.derivative() + top.scale(h))
    sol = exact.solve([[c.coeff(r) for c in cols] for r in range(k + 1)], [rhs.coeff(r) for r in range(k + 1)]) if k else []
    if sol is None:
        return None
    F = pc.Poly(tuple(sol) + (Fraction(1),), pc.RATIONAL)
    if pc.resultant(W, F) == 0 or (F.degree >= 2 and pc.discriminant(F) == 0):
        return None
    G = recover_partner(W, F)
    return PolyPlane.span([G, F])


def fuchsian_instance(p: int, m1: int, m2: int, k1: int):
    """p-plane ``span{I^(p-2) G, I^(p-2) F, x^(p-3), ..., 1}`` built from the exact sl_2 plane."""
    base = sl2_exact_plane(m1, m2, k1)
    if base is None:
        return None
    polys = list(base.basis)
    for _ in range(p - 2):
        polys = [q.integral() for q in polys]
    polys += [pc.Poly.monomial(j) for j in range(p - 3, -1, -1)]
    return PolyPlane.span(polys)
