"""Master function, Bethe equations and Bethe vectors for the sl_2 Gaudin model.

The master function in ``k`` variables is

    Phi(t) = prod_i prod_l (t_i - z_l)^(-m_l) * prod_{i<j} (t_i - t_j)^2

and its critical points solve the Bethe system

    sum_l m_l / (t_i - z_l) - sum_{j != i} 2 / (t_i - t_j) = 0.

:func:`bethe_residual` returns the left-hand side, which is ``-d log Phi``.
Critical points come in orbits under permutation of the ``t_i``; an orbit is
stored canonically, sorted by ``(re, im)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from numbers import Rational
from typing import Sequence

import numpy as np

from . import polynomial_core as pc
from .errors import CoincidingPoints, OnDiagonal
from .sl2_rep import (
    TensorState,
    WeightDatum,
    act,
    basis_indices,
    dim_sing_formula,
    dim_sing_kernel,
    shapovalov_weight,
)

COLLISION_TOL = 1e-6
DEDUP_TOL = 1e-6


class SolverWarning(UserWarning):
    pass


class DegenerateOrbit(ValueError):
    pass


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Rational)) for v in values)


@dataclass(frozen=True)
class MasterProblem:
    M: tuple
    z: tuple
    k: int

    def __post_init__(self):
        M = tuple(int(m) for m in self.M)
        if len(M) != len(self.z):
            raise ValueError("need one point z_l per weight m_l")
        if any(m <= 0 for m in M):
            raise ValueError("weights must be positive")
        if self.k < 0 or 2 * self.k > sum(M):
            raise ValueError(f"k={self.k} outside [0, |M|/2]")
        z = tuple(Fraction(x) if isinstance(x, (int, Rational)) else complex(x) for x in self.z)
        for a in range(len(z)):
            for b in range(a + 1, len(z)):
                if z[a] == z[b]:
                    raise CoincidingPoints(f"z[{a}] == z[{b}]")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return len(self.M)

    @property
    def total(self) -> int:
        return sum(self.M)

    def z_array(self) -> np.ndarray:
        return np.array([complex(x) for x in self.z])

    def m_array(self) -> np.ndarray:
        return np.array(self.M, dtype=float)

    def scale(self) -> float:
        """Spread of the marked points; residuals are reported in these units."""
        z = self.z_array()
        if len(z) < 2:
            return 1.0
        return float(np.max(np.abs(z - z.mean()))) or 1.0

    def wronskian_target(self, kind: str | None = None) -> pc.Poly:
        """``W(x) = prod (x - z_l)^(m_l)``."""
        if kind is None:
            kind = pc.RATIONAL if _is_exact(self.z) else pc.COMPLEX
        W = pc.Poly.constant(1, kind)
        for zl, ml in zip(self.z, self.M):
            W = W * pc.Poly((-zl if kind == pc.RATIONAL else -complex(zl), 1), kind) ** ml
        return W

    def expected_count(self) -> int:
        wd = WeightDatum(self.M, self.k)
        return dim_sing_formula(wd) if self.n >= 2 else dim_sing_kernel(wd)


@dataclass(frozen=True)
class BetheOrbit:
    t: tuple
    residual: float = 0.0
    hessian_min_sv: float = math.inf
    hessian_norm: float = 0.0

    @property
    def k(self) -> int:
        return len(self.t)

    @property
    def hessian_relative_sv(self) -> float:
        if self.hessian_norm == 0:
            return math.inf
        return self.hessian_min_sv / self.hessian_norm


def canonical(t: Sequence) -> tuple:
    """Sort coordinates by ``(re, im)`` after rounding to ``1e-8``."""
    t = [complex(x) for x in t]
    return tuple(sorted(t, key=lambda x: (round(x.real, 8), round(x.imag, 8))))


def multiset_distance(a: Sequence, b: Sequence) -> float:
    """Max displacement of a greedy nearest matching between equal-size multisets."""
    if len(a) != len(b):
        return math.inf
    rest = [complex(x) for x in b]
    worst = 0.0
    for x in sorted((complex(v) for v in a), key=lambda v: (v.real, v.imag)):
        j = min(range(len(rest)), key=lambda i: abs(rest[i] - x))
        worst = max(worst, abs(rest[j] - x))
        rest.pop(j)
    return worst


def _check_configuration(z, t, tol: float = 0.0):
    for i, ti in enumerate(t):
        for zl in z:
            if abs(complex(ti) - complex(zl)) <= tol if tol else ti == zl:
                raise OnDiagonal(f"t[{i}] coincides with a marked point")
        for j in range(i + 1, len(t)):
            if abs(complex(ti) - complex(t[j])) <= tol if tol else ti == t[j]:
                raise OnDiagonal(f"t[{i}] == t[{j}]")


def master_value(p: MasterProblem, t: Sequence):
    """Direct product form of the master function (exact for rational input)."""
    _check_configuration(p.z, t)
    exact_kind = _is_exact(p.z) and _is_exact(t)
    val = Fraction(1) if exact_kind else 1 + 0j
    conv = Fraction if exact_kind else complex
    t = [conv(x) for x in t]
    z = [conv(x) for x in p.z]
    for ti in t:
        for zl, ml in zip(z, p.M):
            val /= (ti - zl) ** ml
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            val *= (t[i] - t[j]) ** 2
    return val


def master_value_discres(p: MasterProblem, t: Sequence):
    """``Disc(F) / ((-1)^(k|M|) Res(W, F))`` with ``F = prod (x - t_i)``.

    ``Disc`` is the standard discriminant ``prod (t_i - t_j)^2``; the sign
    factor undoes the resultant's orientation ``prod (z_l - t_i)^(m_l)``.
    """
    kind = pc.RATIONAL if _is_exact(p.z) and _is_exact(t) else pc.COMPLEX
    F = pc.from_roots([Fraction(x) for x in t] if kind == pc.RATIONAL else [complex(x) for x in t], kind)
    W = p.wronskian_target(kind)
    disc = pc.discriminant(F) if F.degree >= 1 else (Fraction(1) if kind == pc.RATIONAL else 1 + 0j)
    sign = -1 if (len(t) * p.total) % 2 else 1
    return disc / (sign * pc.resultant(W, F))


def bethe_residual(p: MasterProblem, t: Sequence):
    """Left-hand side of the Bethe system; a list (exact) or complex array."""
    _check_configuration(p.z, t)
    if _is_exact(p.z) and _is_exact(t):
        t = [Fraction(x) for x in t]
        return [
            sum(Fraction(m) / (ti - zl) for zl, m in zip(p.z, p.M))
            - sum(Fraction(2) / (ti - tj) for j, tj in enumerate(t) if j != i)
            for i, ti in enumerate(t)
        ]
    tt = np.array([complex(x) for x in t])
    return _residual_batch(tt[None, :], p.z_array(), p.m_array())[0]


def _residual_batch(t: np.ndarray, z: np.ndarray, m: np.ndarray) -> np.ndarray:
    # t: (B, k)
    dz = t[:, :, None] - z[None, None, :]
    r = (m[None, None, :] / dz).sum(axis=2)
    k = t.shape[1]
    if k > 1:
        dt = t[:, :, None] - t[:, None, :]
        idx = np.arange(k)
        dt[:, idx, idx] = 1.0
        inv = 2.0 / dt
        inv[:, idx, idx] = 0.0
        r = r - inv.sum(axis=2)
    return r


def _jacobian_batch(t: np.ndarray, z: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Jacobian of the residual; equals minus the Hessian of ``log Phi``."""
    B, k = t.shape
    dz = t[:, :, None] - z[None, None, :]
    diag = -(m[None, None, :] / dz**2).sum(axis=2)
    J = np.zeros((B, k, k), dtype=complex)
    idx = np.arange(k)
    if k > 1:
        dt = t[:, :, None] - t[:, None, :]
        dt[:, idx, idx] = 1.0
        off = 2.0 / dt**2
        off[:, idx, idx] = 0.0
        J = -off
        diag = diag + off.sum(axis=2)
    J[:, idx, idx] = diag
    return J


def hessian(p: MasterProblem, t: Sequence) -> np.ndarray:
    """Hessian of ``log Phi`` at ``t``."""
    tt = np.array([complex(x) for x in t])
    return -_jacobian_batch(tt[None, :], p.z_array(), p.m_array())[0]


def log_gradient_contour(p: MasterProblem, t: Sequence, points: int = 16) -> np.ndarray:
    """``d log Phi / d t_i`` by Cauchy-contour differentiation of ``Phi``.

    Independent of the analytic residual formula: it only evaluates the
    product form of ``Phi`` on a small circle around each coordinate.
    """
    tt = [complex(x) for x in t]
    z = [complex(x) for x in p.z]
    base = master_value(p, tt)
    out = np.zeros(len(tt), dtype=complex)
    for i, ti in enumerate(tt):
        others = z + [tj for j, tj in enumerate(tt) if j != i]
        r = 1e-2 * min(abs(ti - o) for o in others)
        acc = 0j
        for s in range(points):
            w = np.exp(2j * np.pi * s / points)
            shifted = list(tt)
            shifted[i] = ti + r * w
            acc += master_value(p, shifted) / w
        out[i] = acc / (points * r) / base
    return out


@dataclass
class SolverConfig:
    tol: float = 1e-10
    seed: int = 0
    max_starts: int | None = None
    budget_factor: int = 200
    exhaustive: bool = False
    exhaustive_factor: int = 5
    batch: int = 64
    newton_iters: int = 60
    collision_tol: float = COLLISION_TOL
    dedup_tol: float = DEDUP_TOL
    relative_tol: float = 1e-9

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass
class SolveResult:
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


def newton_batch(F, Jac, t0: np.ndarray, iters: int, conv_tol: float, escape: float = 1e3):
    """Damped Newton on many starts at once.

    ``F(t)`` and ``Jac(t)`` accept ``(B, K)`` arrays.  Steps are halved up to
    six times until the merit ``max_a |F_a| (1 + |t_a|)`` decreases; the
    weight stops the line search from rewarding runaway iterates, along which
    ``F`` itself decays like ``1/t``.  Iterates beyond ``escape`` are dropped
    (marked non-finite).
    """

    def merit(t, r):
        return np.max(np.abs(r) * (1 + np.abs(t)), axis=1)

    t = t0.copy()
    with np.errstate(all="ignore"):
        r = F(t)
        rn = np.max(np.abs(r), axis=1)
        mn = merit(t, r)
        for _ in range(iters):
            active = np.isfinite(rn) & (rn > conv_tol)
            if not active.any():
                break
            ta, ra = t[active], r[active]
            J = Jac(ta)
            try:
                step = np.linalg.solve(J, ra[:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                step = np.stack([np.linalg.lstsq(Ji, ri, rcond=None)[0] for Ji, ri in zip(J, ra)])
            base = mn[active]
            lam = np.ones(len(ta))
            accepted = np.zeros(len(ta), dtype=bool)
            cand_t, cand_r = ta.copy(), ra.copy()
            for _half in range(7):
                trial = ta - lam[:, None] * step
                tr = F(trial)
                tm = merit(trial, tr)
                take = ~accepted & np.isfinite(tm) & (tm < base)
                cand_t[take], cand_r[take] = trial[take], tr[take]
                accepted |= take
                if accepted.all():
                    break
                lam = np.where(accepted, lam, lam / 2)
            # no decrease: keep the smallest step so the iterate can move on
            stuck = ~accepted
            if stuck.any():
                trial = ta[stuck] - lam[stuck, None] * step[stuck]
                cand_t[stuck] = trial
                cand_r[stuck] = F(trial)
            far = np.max(np.abs(cand_t), axis=1) > escape
            cand_r[far] = np.nan
            t[active], r[active] = cand_t, cand_r
            rn[active] = np.max(np.abs(cand_r), axis=1)
            mn[active] = merit(cand_t, cand_r)
    return t, r, rn


def _starts(rng: np.random.Generator, count: int, k: int, z: np.ndarray, strategy: str) -> np.ndarray:
    n = len(z)
    radius = 2 * max(1.0, float(np.max(np.abs(z))))
    if strategy == "gaps" and n >= 2:
        # points in the gaps between neighbours along a (re, im)-sorted path
        zs = z[np.lexsort((z.imag, z.real))]
        g = rng.integers(0, n - 1, size=(count, k))
        u = rng.uniform(0.02, 0.98, size=(count, k))
        a, b = zs[g], zs[g + 1]
        jitter = 0.01 * (rng.normal(size=(count, k)) + 1j * rng.normal(size=(count, k)))
        return a + u * (b - a) + jitter * np.abs(b - a)
    if strategy == "segments" and n >= 2:
        # points interpolated between random pairs of marked points
        a = rng.integers(0, n, size=(count, k))
        b = (a + rng.integers(1, n, size=(count, k))) % n
        u = rng.uniform(0.05, 0.95, size=(count, k))
        jitter = 0.1 * (rng.normal(size=(count, k)) + 1j * rng.normal(size=(count, k)))
        return z[a] + u * (z[b] - z[a]) + jitter * np.abs(z[b] - z[a])
    r = radius * np.sqrt(rng.uniform(size=(count, k)))
    phi = rng.uniform(0, 2 * np.pi, size=(count, k))
    return r * np.exp(1j * phi)


def relative_residual(t: np.ndarray, z: np.ndarray, m: np.ndarray) -> float:
    """Residual divided by the size of the terms it cancels.

    Unlike the plain residual this stays away from zero along runaway
    iterates, where every term decays like ``1/t`` but their sum does not
    cancel (``|M| - 2k + 2 > 0``).
    """
    scale = np.abs(m[None, :] / (t[:, None] - z[None, :])).sum(axis=1)
    if len(t) > 1:
        d = t[:, None] - t[None, :] + np.eye(len(t))
        scale = scale + (np.abs(2 / d) * (1 - np.eye(len(t)))).sum(axis=1)
    r = _residual_batch(t[None, :], z, m)[0]
    return float(np.max(np.abs(r) / scale))


def _admissible(t: np.ndarray, z: np.ndarray, tol: float) -> bool:
    if not np.all(np.isfinite(t)):
        return False
    if np.min(np.abs(t[:, None] - z[None, :])) <= tol:
        return False
    if len(t) > 1:
        d = np.abs(t[:, None] - t[None, :]) + np.eye(len(t)) * 1e300
        if np.min(d) <= tol:
            return False
    return True


class OrbitSet:
    """Deduplicating store for canonical orbits.  Insertion order is irrelevant."""

    def __init__(self, tol: float):
        self.tol = tol
        self.items: list[BetheOrbit] = []

    def add(self, orbit: BetheOrbit) -> bool:
        for i, o in enumerate(self.items):
            if multiset_distance(o.t, orbit.t) <= self.tol:
                if orbit.residual < o.residual:
                    self.items[i] = orbit
                return False
        self.items.append(orbit)
        return True

    def sorted(self) -> list:
        return sorted(self.items, key=lambda o: [(round(x.real, 8), round(x.imag, 8)) for x in o.t])

    def __len__(self):
        return len(self.items)


def _normalized(p: MasterProblem):
    z = p.z_array()
    centre = z.mean()
    s = p.scale()
    return (z - centre) / s, centre, s


def make_orbit(p: MasterProblem, t: Sequence) -> BetheOrbit:
    """Canonical orbit with residual (in units of the z spread) and Hessian data."""
    t = canonical(t)
    if not t:
        return BetheOrbit((), 0.0, math.inf, 0.0)
    s = p.scale()
    res = float(np.max(np.abs(bethe_residual(p, t)))) * s
    sv = np.linalg.svd(hessian(p, t), compute_uv=False) * s * s
    return BetheOrbit(t, res, float(sv[-1]), float(sv[0]))


def solve_orbits(p: MasterProblem, cfg: SolverConfig | None = None) -> SolveResult:
    """Multistart damped Newton for the Bethe system, deduplicated into orbits."""
    cfg = cfg or SolverConfig()
    expected = p.expected_count()
    if p.k == 0:
        return SolveResult([BetheOrbit(())], expected, 0, 0)
    rng = np.random.default_rng(cfg.seed)
    zn, centre, s = _normalized(p)
    m = p.m_array()
    budget = cfg.max_starts or cfg.budget_factor * max(1, expected)
    if cfg.exhaustive:
        budget *= cfg.exhaustive_factor
    F = lambda t: _residual_batch(t, zn, m)
    Jac = lambda t: _jacobian_batch(t, zn, m)
    found = OrbitSet(cfg.dedup_tol)
    used = 0
    rejected = 0
    strategies = ("gaps", "segments", "gaps", "disk")
    batch_no = 0
    while used < budget:
        count = min(cfg.batch, budget - used)
        t0 = _starts(rng, count, p.k, zn, strategies[batch_no % len(strategies)])
        batch_no += 1
        used += count
        t, r, rn = newton_batch(F, Jac, t0, cfg.newton_iters, 1e-3 * cfg.tol)
        for row, norm in zip(t, rn):
            if not (np.isfinite(norm) and norm < cfg.tol):
                continue
            if not _admissible(row, zn, cfg.collision_tol) or relative_residual(row, zn, m) > cfg.relative_tol:
                rejected += 1
                continue
            orbit = make_orbit(p, row * s + centre)
            if orbit.residual < cfg.tol:
                found.add(orbit)
        if not cfg.exhaustive and expected > 0 and len(found) >= expected:
            break
    orbits = found.sorted()
    result = SolveResult(orbits, expected, used, budget, diagnostics={"rejected": rejected})
    if len(orbits) < expected:
        result.budget_exhausted = True
        warnings.warn(f"found {len(orbits)} of {expected} orbits after {used} starts", SolverWarning)
    if len(orbits) > expected:
        result.parasite = True
    return result


# ---- Bethe vectors ---------------------------------------------------------

def bethe_coefficient_perm(J: Sequence[int], z: Sequence, t: Sequence):
    """``A_J`` by direct symmetrization over all permutations of ``t``."""
    slots = [l for l, j in enumerate(J) for _ in range(j)]
    total = 0
    for perm in permutations(range(len(t))):
        term = 1
        for s, a in zip(slots, perm):
            term = term / (t[a] - z[s])
        total += term
    norm = 1
    for j in J:
        norm *= math.factorial(j)
    return total / norm


def bethe_coefficient_dp(J: Sequence[int], z: Sequence, t: Sequence):
    """``A_J`` as a sum over assignments of the ``t_a`` to factors with ``j_l`` slots.

    Each assignment is counted once, which absorbs the ``1/(j_1! ... j_n!)``.
    """
    J = tuple(J)
    states = {J: 1}
    for ta in t:
        nxt: dict = {}
        for rem, val in states.items():
            for l, r in enumerate(rem):
                if r:
                    key = rem[:l] + (r - 1,) + rem[l + 1:]
                    nxt[key] = nxt.get(key, 0) + val / (ta - z[l])
        states = nxt
    return states.get((0,) * len(J), 0)


def bethe_vector(p: MasterProblem, orbit: BetheOrbit, method: str = "auto") -> TensorState:
    """``w = sum_{|J| = k} A_J(t, z) f^J v_M``."""
    t = list(orbit.t)
    z = list(p.z) if _is_exact(p.z) and _is_exact(t) else [complex(x) for x in p.z]
    if not (_is_exact(p.z) and _is_exact(t)):
        t = [complex(x) for x in t]
    for ta in t:
        for zl in z:
            if ta == zl or abs(complex(ta) - complex(zl)) < 1e-300:
                raise DegenerateOrbit("a Bethe root sits on a marked point")
    if method == "auto":
        method = "perm" if len(t) <= 8 else "dp"
    coef = bethe_coefficient_perm if method == "perm" else bethe_coefficient_dp
    entries = {J: coef(J, z, t) for J in basis_indices(p.M, p.k)}
    w = TensorState(p.M, entries)
    if w.is_zero():
        raise DegenerateOrbit("Bethe vector vanishes")
    return w


def singular_defect(w: TensorState) -> float:
    """``||e w|| / ||w||``, zero exactly for singular vectors."""
    return act("e", w).norm() / w.norm()


def bethe_eigenvalues(p: MasterProblem, orbit: BetheOrbit) -> list:
    """``lambda_i = sum_{j != i} m_i m_j / (2 (z_i - z_j)) + sum_a m_i / (t_a - z_i)``."""
    exact_kind = _is_exact(p.z) and _is_exact(orbit.t)
    z = list(p.z) if exact_kind else [complex(x) for x in p.z]
    t = list(orbit.t) if exact_kind else [complex(x) for x in orbit.t]
    two = Fraction(2) if exact_kind else 2.0
    out = []
    for i in range(p.n):
        lam = sum(p.M[i] * p.M[j] / (two * (z[i] - z[j])) for j in range(p.n) if j != i)
        lam += sum(p.M[i] / (ta - z[i]) for ta in t)
        out.append(lam)
    return out


def shapovalov_norm(w: TensorState) -> float:
    """Hermitian companion ``sqrt(sum S_J |w_J|^2)`` of the bilinear Shapovalov form."""
    return math.sqrt(sum(shapovalov_weight(w.M, J) * abs(complex(c)) ** 2 for J, c in w.entries.items()))


def generic_points(n: int, rng: np.random.Generator, spread: int = 1000) -> tuple:
    """Distinct rationals ``z_i = a_i / spread`` with integers ``a_i`` uniform in ``[-spread, spread]``."""
    a = rng.choice(np.arange(-spread, spread + 1), size=n, replace=False)
    return tuple(Fraction(int(x), spread) for x in a)
