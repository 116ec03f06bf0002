"""Linear group actions used by the covered cases, and primitive point streams."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

import numpy as np

from .exact import Matrix, SingularMatrixError, as_exact, format_scalar, parts


# ---------------------------------------------------------------------------
# polynomials


@lru_cache(maxsize=None)
def monomials(n: int, deg: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of total degree ``deg`` in graded lex order, x0 > x1 > ..."""
    if n == 1:
        return ((deg,),)
    out = []
    for e0 in range(deg, -1, -1):
        for rest in monomials(n - 1, deg - e0):
            out.append((e0,) + rest)
    return tuple(out)


def _mono_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Homogeneous polynomial in ``n`` variables with exact coefficients."""

    __slots__ = ("n", "deg", "coeffs")

    def __init__(self, n: int, deg: int, coeffs: Mapping[tuple[int, ...], object]):
        clean = {}
        for e, c in coeffs.items():
            e = tuple(e)
            if len(e) != n or sum(e) != deg or min(e) < 0:
                raise ValueError(f"exponent {e} does not have {n} parts summing to {deg}")
            c = as_exact(c)
            if c != 0:
                clean[e] = c
        self.n = n
        self.deg = deg
        self.coeffs = clean

    @classmethod
    def variable(cls, n: int, i: int) -> Poly:
        e = [0] * n
        e[i] = 1
        return cls(n, 1, {tuple(e): 1})

    @classmethod
    def linear(cls, row: Sequence) -> Poly:
        n = len(row)
        return cls(n, 1, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(row)})

    @classmethod
    def from_vector(cls, n: int, deg: int, vec: Sequence) -> Poly:
        return cls(n, deg, dict(zip(monomials(n, deg), vec)))

    def vector(self) -> tuple:
        """Coefficients in the canonical monomial order (zeros included)."""
        z = Fraction(0)
        return tuple(self.coeffs.get(e, z) for e in monomials(self.n, self.deg))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return (self.n, self.deg) == (other.n, other.deg) and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"Poly(n={self.n}, deg={self.deg}, {self.to_text()})"

    def __add__(self, other: Poly) -> Poly:
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.n, self.deg, out)

    def __sub__(self, other: Poly) -> Poly:
        return self + other.scale(-1)

    def scale(self, c) -> Poly:
        c = as_exact(c)
        return Poly(self.n, self.deg, {e: c * v for e, v in self.coeffs.items()})

    def __mul__(self, other: Poly) -> Poly:
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = _mono_mul(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.n, self.deg + other.deg, out)

    def __call__(self, x: Sequence):
        total = Fraction(0)
        for e, c in self.coeffs.items():
            term = c
            for xi, k in zip(x, e):
                if k:
                    term = term * xi**k
            total = total + term
        return total

    def partial(self, i: int) -> Poly:
        out = {}
        for e, c in self.coeffs.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return Poly(self.n, self.deg - 1, out)

    def pullback(self, g: Matrix) -> Poly:
        return poly_pullback(self, g)

    def to_text(self) -> str:
        """Canonical text form: terms in monomial order, e.g. ``12*x0*x4 - 3*x1*x3``."""
        terms = []
        for e in monomials(self.n, self.deg):
            c = self.coeffs.get(e)
            if c is None:
                continue
            mono = "*".join(f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k)
            terms.append((c, mono))
        if not terms:
            return "0"
        pieces = []
        for idx, (c, mono) in enumerate(terms):
            u, w = parts(c)
            if w == 0:
                neg, body = u < 0, str(abs(u))
            else:
                neg, body = False, f"({format_scalar(c)})"
            if mono:
                body = mono if body == "1" else f"{body}*{mono}"
            if idx == 0:
                pieces.append(f"-{body}" if neg else body)
            else:
                pieces.append(f"{'-' if neg else '+'} {body}")
        return " ".join(pieces)


def _linear_power_cache(forms: list[Poly]):
    cache: dict[tuple[int, int], Poly] = {}

    def power(i: int, k: int) -> Poly:
        if (i, k) not in cache:
            if k == 0:
                cache[(i, k)] = Poly(forms[i].n, 0, {(0,) * forms[i].n: 1})
            else:
                cache[(i, k)] = power(i, k - 1) * forms[i]
        return cache[(i, k)]

    return power


def substitute(p: Poly, m: Matrix) -> Poly:
    """Return x -> p(m x), expanded exactly."""
    n = p.n
    if m.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix")
    forms = [Poly.linear(row) for row in m.rows]
    power = _linear_power_cache(forms)
    out: dict = {}
    for e, c in p.coeffs.items():
        term = Poly(n, 0, {(0,) * n: c})
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        for f, v in term.coeffs.items():
            out[f] = out.get(f, 0) + v
    return Poly(n, p.deg, out)


def poly_pullback(p: Poly, g: Matrix) -> Poly:
    """The polynomial x -> p(g^{-1} x)."""
    return substitute(p, _inv(g))


def _inv(g: Matrix) -> Matrix:
    try:
        return g.inv()
    except SingularMatrixError:
        raise SingularMatrixError("the acting matrix must be invertible") from None


# ---------------------------------------------------------------------------
# binary forms and Sym^deg of GL(2)


@dataclass(frozen=True)
class BinaryForm:
    """sum_i coeffs[i] * v1^(deg-i) * v2^i."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_exact(c) for c in self.coeffs))
        if len(self.coeffs) < 2:
            raise ValueError("a binary form needs degree >= 1")

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    def act(self, s: Matrix) -> BinaryForm:
        return BinaryForm(sym_power_action(s, self.deg) @ self.coeffs)


def _binary_substitution(m: Matrix, deg: int) -> Matrix:
    # column i: coefficients of (a v1 + b v2)^(deg-i) (c v1 + d v2)^i
    (a, b), (c, d) = m.rows
    v1 = Poly(2, 1, {(1, 0): a, (0, 1): b})
    v2 = Poly(2, 1, {(1, 0): c, (0, 1): d})
    cols = []
    for i in range(deg + 1):
        f = Poly(2, 0, {(0, 0): 1})
        for _ in range(deg - i):
            f = f * v1
        for _ in range(i):
            f = f * v2
        cols.append([f.coeffs.get((deg - j, j), Fraction(0)) for j in range(deg + 1)])
    return Matrix.from_columns(cols)


def sym_power_action(s: Matrix, deg: int) -> Matrix:
    """Matrix of f -> f o s^{-1} on binary forms of degree ``deg``."""
    if s.shape != (2, 2):
        raise ValueError("sym_power_action expects a 2x2 matrix")
    return _binary_substitution(_inv(s), deg)


def sym_power_differential(x: Matrix, deg: int) -> Matrix:
    """Derivative at the identity of s -> sym_power_action(s, deg) along x."""
    (x11, x12), (x21, x22) = x.rows
    rows = [[Fraction(0)] * (deg + 1) for _ in range(deg + 1)]
    for i in range(deg + 1):
        # v1 -> v1 - t(x11 v1 + x12 v2), v2 -> v2 - t(x21 v1 + x22 v2), first order
        rows[i][i] -= (deg - i) * x11 + i * x22
        if i + 1 <= deg:
            rows[i + 1][i] -= (deg - i) * x12
        if i >= 1:
            rows[i - 1][i] -= i * x21
    return Matrix(rows)


# ---------------------------------------------------------------------------
# bilinear forms, adjoint action


@dataclass(frozen=True)
class AltForm2:
    """Alternating bilinear form B(x, y) = x^T M y."""

    matrix: Matrix

    def __post_init__(self):
        if self.matrix.T != -self.matrix:
            raise ValueError("matrix of an alternating form must be antisymmetric")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x: Sequence, y: Sequence):
        return sum((a * b for a, b in zip(x, self.matrix @ tuple(y))), Fraction(0))

    def upper(self) -> tuple:
        """The n(n-1)/2 independent entries M[i][j], i < j, row by row."""
        m = self.matrix
        return tuple(m[i, j] for i in range(self.n) for j in range(i + 1, self.n))


def altform_pullback(form: AltForm2, g: Matrix) -> AltForm2:
    """The form (x, y) -> B(g^{-1} x, g^{-1} y)."""
    gi = _inv(g)
    return AltForm2(gi.T @ form.matrix @ gi)


def adjoint_action(g: Matrix, x: Matrix) -> Matrix:
    if x.trace() != 0:
        raise ValueError("adjoint action is defined on traceless matrices")
    return g @ x @ _inv(g)


# ---------------------------------------------------------------------------
# primitive integer points


def primitive_points(n: int, radius: int) -> Iterator[tuple[int, ...]]:
    """Primitive x in Z^n with 0 < |x|_inf <= radius, in lexicographic order."""
    if n < 1 or radius < 1:
        raise ValueError("need n >= 1 and radius >= 1")
    rng = range(-radius, radius + 1)
    for x in itertools.product(rng, repeat=n):
        if math.gcd(*x) == 1:
            yield x


def primitive_shard(n: int, radius: int, lead: int) -> np.ndarray:
    """All primitive points with first coordinate ``lead``, as an int64 array.

    Rows come in the same lexicographic order as :func:`primitive_points`, so
    concatenating shards for lead = -radius..radius reproduces the stream.
    """
    if n == 1:
        return np.array([[lead]], dtype=np.int64) if abs(lead) == 1 else np.zeros((0, 1), np.int64)
    axis = np.arange(-radius, radius + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * (n - 1)), indexing="ij")
    rest = np.stack([g.ravel() for g in grids], axis=1)
    g = np.gcd.reduce(np.abs(rest), axis=1)
    g = np.gcd(g, abs(lead))
    keep = g == 1
    pts = np.empty((int(keep.sum()), n), dtype=np.int64)
    pts[:, 0] = lead
    pts[:, 1:] = rest[keep]
    return pts


def is_primitive(x: Sequence[int]) -> bool:
    return math.gcd(*(int(v) for v in x)) == 1
