"""Dense univariate polynomials over exact rationals or complex doubles.

A :class:`Poly` stores its coefficients in ascending order (``coeffs[i]`` is
the coefficient of ``x**i``) together with a scalar *kind*:

* ``"rational"`` -- :class:`fractions.Fraction` coefficients, exact;
* ``"complex"`` -- Python ``complex`` coefficients, always finite.

The zero polynomial has an empty coefficient tuple and degree ``-1``.
Serialized forms (:meth:`Poly.to_json`) list coefficients in *descending*
order; the conversion happens only at that boundary.

Sign conventions
----------------
``resultant(f, g)`` is the determinant of the Sylvester matrix whose first
``deg g`` rows hold the (descending) coefficients of ``f`` and whose last
``deg f`` rows hold those of ``g``.  For ``f = a * prod(x - alpha_i)`` and
``g = b * prod(x - beta_j)`` this equals
``a**deg(g) * b**deg(f) * prod(alpha_i - beta_j)``.  The discriminant is
``(-1)**(n(n-1)/2) * resultant(f, f') / lc(f)``, which for monic ``f`` equals
``prod_{i<j} (t_i - t_j)**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from . import exact

RATIONAL = "rational"
COMPLEX = "complex"
KINDS = (RATIONAL, COMPLEX)

ROOT_TOLERANCE = 1e-12
# relative size below which a leading complex coefficient counts as cancelled
COEFF_RTOL = 1e-11


class PolynomialError(ArithmeticError):
    pass


class KindMismatch(PolynomialError):
    pass


class NonFiniteValue(PolynomialError):
    pass


class ZeroPolynomial(PolynomialError):
    pass


class ProportionalInputs(PolynomialError):
    pass


class DependentInputs(PolynomialError):
    pass


class NonDivisible(PolynomialError):
    pass


class NoConvergence(PolynomialError):
    """Root iteration did not meet its tolerance.

    ``diagnostics`` carries the iteration count and final residuals.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def _to_scalar(value, kind):
    if kind == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise KindMismatch(f"cannot store {value!r} exactly as a rational")
    c = complex(value)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise NonFiniteValue(f"non-finite coefficient {value!r}")
    return c


@dataclass(frozen=True)
class Poly:
    coeffs: tuple
    kind: str = RATIONAL

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scalar kind {self.kind!r}")
        cs = [_to_scalar(c, self.kind) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    # construction -------------------------------------------------------
    @classmethod
    def from_descending(cls, coeffs: Sequence, kind: str = RATIONAL) -> "Poly":
        return cls(tuple(reversed(list(coeffs))), kind)

    @classmethod
    def constant(cls, c, kind: str = RATIONAL) -> "Poly":
        return cls((c,), kind)

    @classmethod
    def monomial(cls, n: int, c=1, kind: str = RATIONAL) -> "Poly":
        return cls((0,) * n + (c,), kind)

    @classmethod
    def zero(cls, kind: str = RATIONAL) -> "Poly":
        return cls((), kind)

    # basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self):
        if not self.coeffs:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def coeff(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0) if self.kind == RATIONAL else 0j

    def descending(self) -> list:
        return list(reversed(self.coeffs))

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    # kind handling ------------------------------------------------------
    def as_complex(self) -> "Poly":
        if self.kind == COMPLEX:
            return self
        return Poly(tuple(complex(c) for c in self.coeffs), COMPLEX)

    def _common(self, other):
        if isinstance(other, Poly):
            if other.kind != self.kind:
                raise KindMismatch(f"{self.kind} vs {other.kind}")
            return other
        return Poly((other,), self.kind)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._common(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(tuple(self.coeff(i) + other.coeff(i) for i in range(n)), self.kind)

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs), self.kind)

    def __sub__(self, other):
        return self + (-self._common(other))

    def __rsub__(self, other):
        return self._common(other) - self

    def __mul__(self, other):
        other = self._common(other)
        if not self.coeffs or not other.coeffs:
            return Poly.zero(self.kind)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out), self.kind)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = Poly.constant(1, self.kind)
        for _ in range(n):
            result = result * self
        return result

    def scale(self, c) -> "Poly":
        return Poly(tuple(c * a for a in self.coeffs), self.kind)

    def derivative(self, order: int = 1) -> "Poly":
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [i * cs[i] for i in range(1, len(cs))]
        return Poly(tuple(cs), self.kind)

    def integral(self) -> "Poly":
        """Antiderivative with zero constant term."""
        one = Fraction(1) if self.kind == RATIONAL else 1.0
        return Poly((0,) + tuple(c * one / (i + 1) for i, c in enumerate(self.coeffs)), self.kind)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other: "Poly"):
        other = self._common(other)
        if other.is_zero():
            raise ZeroPolynomial("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lc
        q = [0] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            q[i - dq] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
            rem[i] = 0
        return Poly(tuple(q), self.kind), Poly(tuple(rem[:dq]), self.kind)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_quotient(self, other: "Poly", rtol: float = 1e-9) -> "Poly":
        """Quotient that must leave no remainder (relative ``rtol`` for complex)."""
        q, r = self.divmod(other)
        if self.kind == RATIONAL:
            if r:
                raise NonDivisible("nonzero remainder")
        elif r.max_abs_coeff() > rtol * max(1.0, self.max_abs_coeff()):
            raise NonDivisible(f"remainder of size {r.max_abs_coeff():.3e}")
        return q

    def monic(self) -> "Poly":
        if self.is_zero():
            raise ZeroPolynomial("cannot normalize the zero polynomial")
        lead = self.lc
        return Poly(tuple(c / lead for c in self.coeffs), self.kind)

    def trimmed(self, rtol: float = COEFF_RTOL) -> "Poly":
        """Drop cancelled leading coefficients (complex kind only)."""
        if self.kind == RATIONAL or not self.coeffs:
            return self
        scale = self.max_abs_coeff()
        cs = list(self.coeffs)
        while cs and abs(cs[-1]) <= rtol * scale:
            cs.pop()
        return Poly(tuple(cs), self.kind)

    def taylor(self, x0) -> "Poly":
        """Coefficients of ``p(x0 + y)`` as a polynomial in ``y``."""
        cs = []
        p = self
        fact = 1
        for i in range(len(self.coeffs)):
            v = p(x0)
            cs.append(v / fact if self.kind == COMPLEX else Fraction(v) / fact)
            p = p.derivative()
            fact *= i + 1
        return Poly(tuple(cs), self.kind)

    def valuation(self, x0=0, rtol: float = 0.0) -> int:
        """Order of vanishing at ``x0`` (``rtol`` relative threshold for complex)."""
        t = self.taylor(x0)
        if t.is_zero():
            raise ZeroPolynomial("valuation of the zero polynomial")
        thresh = rtol * t.max_abs_coeff()
        for i, c in enumerate(t.coeffs):
            if abs(c) > thresh:
                return i
        return t.degree

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {"kind": self.kind, "coeffs": [scalar_to_json(c) for c in self.descending()]}

    @classmethod
    def from_json(cls, obj: dict) -> "Poly":
        kind = obj["kind"]
        return cls.from_descending([scalar_from_json(c, kind) for c in obj["coeffs"]], kind)

    def __repr__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        return f"Poly[{self.kind}](" + (" + ".join(terms) or "0") + ")"


def scalar_to_json(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    if isinstance(c, int):
        return f"{c}/1"
    c = complex(c)
    return [c.real, c.imag]


def scalar_from_json(obj, kind):
    if kind == RATIONAL:
        return Fraction(obj)
    re, im = obj
    return complex(re, im)


def x_poly(kind: str = RATIONAL) -> Poly:
    return Poly.monomial(1, 1, kind)


def _require_same_kind(*polys: Poly):
    kinds = {p.kind for p in polys}
    if len(kinds) > 1:
        raise KindMismatch(f"mixed scalar kinds {sorted(kinds)}")


def _clean(p: Poly) -> Poly:
    return p.trimmed() if p.kind == COMPLEX else p


def wronskian2(f: Poly, g: Poly) -> Poly:
    """Monic normalization of ``f' g - f g'``."""
    _require_same_kind(f, g)
    if f.is_zero() or g.is_zero():
        raise ProportionalInputs("zero input")
    w = _clean(f.derivative() * g - f * g.derivative())
    if w.is_zero():
        raise ProportionalInputs("f and g are proportional")
    return w.monic()


def _perm_sign_insert(used: int, col: int) -> int:
    # number of already-used columns to the right of col
    return (-1) ** bin(used >> (col + 1)).count("1")


def wronskian_det(fs: Sequence[Poly]) -> Poly:
    """Unnormalized Wronski determinant ``det(f_j^{(i)})``.

    Rows are derivative orders, columns are the inputs.  The determinant is
    expanded row by row over column subsets, which needs only polynomial
    multiplication.
    """
    if not fs:
        return Poly.constant(1)
    _require_same_kind(*fs)
    kind = fs[0].kind
    l = len(fs)
    derivs = [[f.derivative(i) for f in fs] for i in range(l)]
    # partial[mask] = signed sum over injections of the first popcount rows into mask
    partial = {0: Poly.constant(1, kind)}
    for i in range(l):
        nxt: dict = {}
        for mask, val in partial.items():
            for c in range(l):
                if mask & (1 << c) or derivs[i][c].is_zero():
                    continue
                term = val * derivs[i][c]
                if _perm_sign_insert(mask, c) < 0:
                    term = -term
                nm = mask | (1 << c)
                nxt[nm] = nxt[nm] + term if nm in nxt else term
        partial = nxt
    return partial.get((1 << l) - 1, Poly.zero(kind))


def wronskian_p(fs: Sequence[Poly]) -> Poly:
    """Monic Wronskian of ``l`` polynomials."""
    if not fs:
        raise DependentInputs("empty input")
    w = _clean(wronskian_det(fs))
    if w.is_zero():
        raise DependentInputs("inputs are linearly dependent")
    return w.monic()


def sylvester_matrix(f: Poly, g: Poly) -> list[list]:
    m, n = f.degree, g.degree
    size = m + n
    zero = Fraction(0) if f.kind == RATIONAL else 0j
    fd, gd = f.descending(), g.descending()
    rows = []
    for i in range(n):
        rows.append([zero] * i + fd + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + gd + [zero] * (size - n - 1 - i))
    return rows


def _complex_det(matrix) -> complex:
    """Determinant by Gaussian elimination with partial pivoting."""
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    sign = 1.0
    result = 1.0 + 0j
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0:
            return 0j
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            sign = -sign
        result *= a[col, col]
        a[col + 1:, col:] -= np.outer(a[col + 1:, col] / a[col, col], a[col, col:])
    return complex(sign * result)


def resultant(f: Poly, g: Poly):
    """Sylvester-determinant resultant (see the module docstring for the sign)."""
    _require_same_kind(f, g)
    if f.is_zero() or g.is_zero():
        raise ZeroPolynomial("resultant with the zero polynomial")
    if f.degree == 0 and g.degree == 0:
        return Fraction(1) if f.kind == RATIONAL else 1 + 0j
    if f.degree == 0:
        return f.lc ** g.degree
    if g.degree == 0:
        return g.lc ** f.degree
    mat = sylvester_matrix(f, g)
    if f.kind == RATIONAL:
        return exact.det(mat)
    return _complex_det(mat)


def discriminant(f: Poly):
    n = f.degree
    if n < 1:
        raise PolynomialError("discriminant needs degree >= 1")
    if n == 1:
        return Fraction(1) if f.kind == RATIONAL else 1 + 0j
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative()) / f.lc


def from_roots(ts: Iterable, kind: str | None = None) -> Poly:
    """Monic polynomial with exactly the given roots (empty -> 1)."""
    ts = list(ts)
    if kind is None:
        kind = RATIONAL if all(isinstance(t, (int, Fraction)) for t in ts) else COMPLEX
    p = Poly.constant(1, kind)
    for t in ts:
        p = p * Poly((-t, 1), kind)
    return p


def _aberth(c: np.ndarray, max_iter: int, tol: float):
    """Aberth--Ehrlich iteration for the monic polynomial with ascending coeffs ``c``."""
    n = len(c) - 1
    desc = c[::-1]
    dd = np.polyder(desc)
    radius = 1 + np.max(np.abs(c[:-1]))
    # Fujiwara-type bound is tighter than Cauchy's for spread-out roots
    fuj = 2 * max(abs(c[n - k]) ** (1.0 / k) for k in range(1, n + 1))
    radius = min(radius, fuj) if fuj > 0 else radius
    centre = -c[n - 1] / n
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = centre + radius * np.exp(1j * angles)
    it = 0
    for it in range(1, max_iter + 1):
        pv = np.polyval(desc, z)
        dv = np.polyval(dd, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            step = ratio / (1 - ratio * s)
        bad = ~np.isfinite(step)
        if bad.any():
            step[bad] = 1e-3 * radius * np.exp(1j * it)
        z = z - step
        if np.max(np.abs(step)) <= tol * max(1.0, np.max(np.abs(z))):
            break
    return z, it


def _cluster(z: np.ndarray, radius: float) -> list[tuple[complex, int]]:
    """Group nearby roots into ``(centroid, multiplicity)`` pairs."""
    remaining = list(range(len(z)))
    out = []
    while remaining:
        i = remaining.pop(0)
        group = [i]
        changed = True
        while changed:
            changed = False
            for j in list(remaining):
                if any(abs(z[j] - z[g]) < radius for g in group):
                    group.append(j)
                    remaining.remove(j)
                    changed = True
        out.append((complex(np.mean(z[group])), len(group)))
    return out


def _polish_multiple(g: Poly, centre: complex, mult: int) -> complex:
    # a root of multiplicity mu is a simple root of the (mu-1)-th derivative
    d = g.derivative(mult - 1)
    dd = d.derivative()
    z = centre
    for _ in range(4):
        dv = dd(z)
        if dv == 0:
            break
        nz = z - d(z) / dv
        if abs(nz - centre) > 10 * abs(z - centre) + 1e-6:
            break
        z = nz
    return z


def roots(f: Poly, root_tolerance: float = ROOT_TOLERANCE, max_iter: int = 500) -> list[complex]:
    """All complex roots with multiplicity, sorted by ``(re, im)``.

    Roots closer than ``10 * sqrt(root_tolerance)`` are reported as one
    cluster centroid repeated by its size.
    """
    if f.degree < 1:
        raise PolynomialError("roots need degree >= 1")
    g = f.as_complex().monic()
    c = np.array(g.coeffs, dtype=complex)
    n = g.degree
    # peel off exact zero roots (common for Wronskians at z = 0)
    nz = 0
    while nz < n and c[nz] == 0:
        nz += 1
    found = [0j] * nz
    if nz < n:
        z, it = _aberth(c[nz:], max_iter, 1e-15)
        desc = c[nz:][::-1]
        dd = np.polyder(desc)
        for _ in range(3):
            dv = np.polyval(dd, z)
            ok = np.abs(dv) > 0
            z = np.where(ok, z - np.polyval(desc, z) / np.where(ok, dv, 1), z)
        found.extend(complex(v) for v in z)
    else:
        it = 0
    clustered = []
    for centre, mult in _cluster(np.array(found), 10 * math.sqrt(root_tolerance)):
        if mult > 1:
            centre = _polish_multiple(g, centre, mult)
        clustered.extend([centre] * mult)
    scale = 1 + g.max_abs_coeff()
    resid = [abs(g(r)) / scale for r in clustered]
    if max(resid) >= root_tolerance:
        raise NoConvergence(
            f"root residual {max(resid):.3e} exceeds {root_tolerance:.1e}",
            {"iterations": it, "residuals": resid, "roots": clustered},
        )
    return sorted(clustered, key=lambda r: (r.real, r.imag))


def to_numpy(p: Poly) -> np.ndarray:
    """Ascending complex coefficient array."""
    return np.array([complex(c) for c in p.coeffs], dtype=complex)


def rel_distance(p: Poly, q: Poly) -> float:
    """Coefficientwise distance relative to the larger coefficient norm."""
    n = max(len(p.coeffs), len(q.coeffs))
    a = np.zeros(n, dtype=complex)
    b = np.zeros(n, dtype=complex)
    a[: len(p.coeffs)] = to_numpy(p)
    b[: len(q.coeffs)] = to_numpy(q)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)
    return float(np.linalg.norm(a - b) / scale)
