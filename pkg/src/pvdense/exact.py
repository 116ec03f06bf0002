"""Exact arithmetic over Q and a single real quadratic field Q(sqrt(d)).

Scalars are either :class:`fractions.Fraction` (or ``int``) or
:class:`QScalar`.  All linear algebra in this module is duck-typed over those
two kinds, so purely rational computations never pay for the quadratic
machinery.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence


class FieldMismatchError(ValueError):
    """Raised when two different square roots meet in one computation."""


@lru_cache(maxsize=None)
def _check_d(d: int) -> int:
    if not isinstance(d, int) or d < 2:
        raise ValueError(f"field parameter must be an integer >= 2, got {d!r}")
    if squarefree_part(d) != d:
        raise ValueError(f"field parameter {d} is not square-free")
    return d


def squarefree_part(n: int) -> int:
    """Return the square-free kernel s of a positive integer n = s * m**2."""
    if n <= 0:
        raise ValueError("squarefree_part needs a positive integer")
    s, p = 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
        if n % p == 0:
            s *= p
            n //= p
        p += 1
    return s * n


def _join(d1: int | None, d2: int | None) -> int | None:
    if d1 is None:
        return d2
    if d2 is None or d1 == d2:
        return d1
    raise FieldMismatchError(f"cannot combine sqrt({d1}) and sqrt({d2}) in one computation")


class QScalar:
    """Exact element ``u + w*sqrt(d)`` of Q(sqrt(d)).

    ``d`` may be ``None`` only when ``w == 0``.
    """

    __slots__ = ("u", "w", "d")

    def __init__(self, u: Rational | int = 0, w: Rational | int = 0, d: int | None = None):
        u = Fraction(u)
        w = Fraction(w)
        if d is not None:
            _check_d(d)
        elif w:
            raise ValueError("an irrational part needs a field parameter d")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QScalar is immutable")

    @property
    def field(self) -> int | None:
        """The square root actually in use (None when the value is rational)."""
        return self.d if self.w else None

    def is_rational(self) -> bool:
        return self.w == 0

    def conj(self) -> QScalar:
        return QScalar(self.u, -self.w, self.d)

    def norm(self) -> Fraction:
        return self.u * self.u - (self.d or 0) * self.w * self.w

    def __float__(self) -> float:
        if not self.w:
            return float(self.u)
        return float(self.u) + float(self.w) * math.sqrt(self.d)

    def __bool__(self) -> bool:
        return bool(self.u) or bool(self.w)

    def __repr__(self) -> str:
        if self.d is None:
            return f"QScalar({self.u})"
        return f"QScalar({self.u}, {self.w}, d={self.d})"

    def __str__(self) -> str:
        return format_scalar(self)

    @staticmethod
    def _coerce(other) -> QScalar | None:
        if isinstance(other, QScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return QScalar(other)
        return None

    def __eq__(self, other) -> bool:
        o = QScalar._coerce(other)
        if o is None:
            return NotImplemented
        if self.u != o.u or self.w != o.w:
            return False
        return not self.w or self.d == o.d

    def __hash__(self) -> int:
        if not self.w:
            return hash(self.u)
        return hash((self.u, self.w, self.d))

    def __neg__(self) -> QScalar:
        return QScalar(-self.u, -self.w, self.d)

    def __pos__(self) -> QScalar:
        return self

    def __add__(self, other):
        o = QScalar._coerce(other)
        if o is None:
            return NotImplemented
        d = _join(self.field, o.field) or self.d or o.d
        return QScalar(self.u + o.u, self.w + o.w, d)

    __radd__ = __add__

    def __sub__(self, other):
        o = QScalar._coerce(other)
        if o is None:
            return NotImplemented
        d = _join(self.field, o.field) or self.d or o.d
        return QScalar(self.u - o.u, self.w - o.w, d)

    def __rsub__(self, other):
        o = QScalar._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = QScalar._coerce(other)
        if o is None:
            return NotImplemented
        d = _join(self.field, o.field) or self.d or o.d
        if not self.w or not o.w:
            return QScalar(self.u * o.u, self.u * o.w + self.w * o.u, d)
        return QScalar(self.u * o.u + d * self.w * o.w, self.u * o.w + self.w * o.u, d)

    __rmul__ = __mul__

    def inverse(self) -> QScalar:
        if not self:
            raise ZeroDivisionError("QScalar division by zero")
        if not self.w:
            return QScalar(1 / self.u, 0, self.d)
        n = self.norm()
        return QScalar(self.u / n, -self.w / n, self.d)

    def __truediv__(self, other):
        o = QScalar._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = QScalar._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int) -> QScalar:
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        result = QScalar(1, 0, self.d)
        for _ in range(abs(k)):
            result = result * base
        return result


def sqrt_of(d: int) -> QScalar:
    """The generator sqrt(d) of Q(sqrt(d))."""
    return QScalar(0, 1, d)


def as_exact(x):
    """Coerce ``x`` to an exact scalar; floats are refused."""
    if isinstance(x, (QScalar, Fraction)):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(
        f"exact scalar expected, got {type(x).__name__}; "
        "reconstruct float data with rational_reconstruct first"
    )


def parts(x) -> tuple[Fraction, Fraction]:
    """Split an exact scalar into (rational part, sqrt coefficient)."""
    if isinstance(x, QScalar):
        return x.u, x.w
    return Fraction(x), Fraction(0)


def field_of(values: Iterable) -> int | None:
    """Common field parameter of exact values (None if all rational)."""
    d = None
    for v in values:
        if isinstance(v, QScalar):
            d = _join(d, v.field)
    return d


def is_rational(x) -> bool:
    return not isinstance(x, QScalar) or x.w == 0


def conj(x):
    return x.conj() if isinstance(x, QScalar) else x


def exact_sign(x) -> int:
    """Sign of an exact real scalar, decided without floating point."""
    u, w = parts(x)
    su = (u > 0) - (u < 0)
    sw = (w > 0) - (w < 0)
    if sw == 0 or su == sw:
        return su or sw
    if su == 0:
        return sw
    # opposite signs: compare u^2 with d w^2
    lhs, rhs = u * u, x.d * w * w
    return su if lhs > rhs else sw


def qsqrt(x):
    """Exact square root of ``x`` inside its own field, or None.

    For a rational ``x`` that is not a rational square the result lives in
    Q(sqrt(s)) with s the square-free part of ``x``.
    """
    u, w = parts(x)
    d = x.field if isinstance(x, QScalar) else None
    if w == 0:
        if u < 0:
            return None
        if u == 0:
            return Fraction(0)
        r = _rational_sqrt(u)
        if r is not None:
            return r
        num = u.numerator * u.denominator
        s = squarefree_part(num)
        if d is not None and s != d:
            return None
        coef = _rational_sqrt(Fraction(num, s)) / u.denominator
        return QScalar(0, coef, s)
    # (a + b sqrt d)^2 = u + w sqrt d  =>  a^2 + d b^2 = u,  2ab = w
    disc = u * u - d * w * w
    root = _rational_sqrt(disc) if disc >= 0 else None
    if root is None:
        return None
    for a2 in ((u + root) / 2, (u - root) / 2):
        a = _rational_sqrt(a2) if a2 > 0 else None
        if a is not None:
            b = w / (2 * a)
            return QScalar(a, b, d)
    return None


def _rational_sqrt(q: Fraction) -> Fraction | None:
    q = Fraction(q)
    if q < 0:
        return None
    n, m = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and m * m == q.denominator:
        return Fraction(n, m)
    return None


# ---------------------------------------------------------------------------
# text syntax

_NUM = r"\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"""^(?:(?P<rat>[+-]?{_NUM})(?=$|[+-])|(?=[+-]?(?:{_NUM}\*)?sqrt))
        (?:(?P<sign>[+-])?(?:(?P<coef>{_NUM})\*)?sqrt\((?P<d>\d+)\))?$""",
    re.VERBOSE,
)


def parse_scalar(text: str, d: int | None = None):
    """Parse ``p/q`` or ``p/q+r/s*sqrt(D)``; whitespace is ignored.

    If ``d`` is given, any sqrt must use exactly that D.
    """
    s = re.sub(r"\s+", "", text)
    m = _SCALAR_RE.match(s)
    if not s or m is None or (m.group("rat") is None and m.group("d") is None):
        raise ValueError(f"cannot parse exact scalar {text!r}")
    rat = Fraction(m.group("rat")) if m.group("rat") else Fraction(0)
    if m.group("d") is None:
        return rat
    root = int(m.group("d"))
    if d is not None and root != d:
        raise FieldMismatchError(f"sqrt({root}) in {text!r} does not match field sqrt({d})")
    coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
    if m.group("sign") == "-":
        coef = -coef
    s_free = squarefree_part(root)
    k = _rational_sqrt(Fraction(root, s_free))
    if s_free == 1:
        return rat + coef * k
    return QScalar(rat, coef * k, s_free)


def format_scalar(x) -> str:
    u, w = parts(x)
    if not w:
        return str(u)
    d = x.d
    coef = "" if abs(w) == 1 else f"{abs(w)}*"
    sign = "-" if w < 0 else "+"
    if u == 0:
        return f"{'-' if w < 0 else ''}{coef}sqrt({d})"
    return f"{u}{sign}{coef}sqrt({d})"


# ---------------------------------------------------------------------------
# dense matrices


def _zero(x) -> bool:
    return x == 0


class Matrix:
    """Immutable dense matrix with exact entries."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(as_exact(x) for x in row) for row in rows)
        if data and len({len(r) for r in data}) != 1:
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", data)

    @classmethod
    def _raw(cls, rows) -> Matrix:
        m = object.__new__(cls)
        object.__setattr__(m, "rows", tuple(tuple(r) for r in rows))
        return m

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls._raw([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m: int, n: int) -> Matrix:
        return cls._raw([[Fraction(0)] * n for _ in range(m)])

    @classmethod
    def diag(cls, entries: Sequence) -> Matrix:
        n = len(entries)
        z = Fraction(0)
        return cls([[entries[i] if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> Matrix:
        return cls(zip(*cols))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __iter__(self):
        return iter(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self) -> str:
        body = "; ".join(", ".join(format_scalar(x) for x in r) for r in self.rows)
        return f"Matrix([{body}])"

    @property
    def T(self) -> Matrix:
        return Matrix._raw(zip(*self.rows)) if self.rows else self

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def entries(self):
        return [x for r in self.rows for x in r]

    @property
    def field(self) -> int | None:
        return field_of(self.entries())

    def __add__(self, other: Matrix) -> Matrix:
        return Matrix._raw([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other: Matrix) -> Matrix:
        return Matrix._raw([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self) -> Matrix:
        return Matrix._raw([[-a for a in r] for r in self.rows])

    def scale(self, c) -> Matrix:
        c = as_exact(c)
        return Matrix._raw([[c * a for a in r] for r in self.rows])

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            cols = list(zip(*other.rows))
            return Matrix._raw([[_dot(r, c) for c in cols] for r in self.rows])
        return tuple(_dot(r, other) for r in self.rows)

    def trace(self):
        return sum((self.rows[i][i] for i in range(len(self.rows))), Fraction(0))

    def det(self):
        return det(self)

    def inv(self) -> Matrix:
        return inverse(self)

    def rank(self) -> int:
        return rank(self)

    def kernel(self) -> list[tuple]:
        return exact_kernel(self)

    def __pow__(self, k: int) -> Matrix:
        n = self.shape[0]
        base = self if k >= 0 else self.inv()
        out = Matrix.identity(n)
        for _ in range(abs(k)):
            out = out @ base
        return out

    def to_float(self):
        import numpy as np

        return np.array([[float(x) for x in r] for r in self.rows], dtype=float)


def _dot(a: Sequence, b: Sequence):
    acc = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            acc = acc + x * y
    return acc


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; pivots are the first nonzero entry found."""
    m = [[as_exact(x) for x in r] for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if not _zero(m[i][c])), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv if not _zero(x) else x for x in m[r]]
        for i in range(n_rows):
            if i != r and not _zero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b if not _zero(b) else a for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Matrix | Sequence[Sequence]) -> int:
    rows = a.rows if isinstance(a, Matrix) else a
    if not rows:
        return 0
    return len(rref(rows)[1])


def exact_kernel(a: Matrix | Sequence[Sequence]) -> list[tuple]:
    """Basis of the right null space, one vector per free column."""
    rows = a.rows if isinstance(a, Matrix) else [list(r) for r in a]
    if not rows:
        return []
    n = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(tuple(v))
    return basis


def det(a: Matrix):
    rows = [list(r) for r in a.rows]
    n = len(rows)
    if n != (len(rows[0]) if rows else 0):
        raise ValueError("determinant of a non-square matrix")
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if not _zero(rows[i][c])), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            result = -result
        piv = rows[c][c]
        result = result * piv
        inv = 1 / piv
        for i in range(c + 1, n):
            if not _zero(rows[i][c]):
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return result


class SingularMatrixError(ValueError):
    pass


def inverse(a: Matrix) -> Matrix:
    n, m = a.shape
    if n != m:
        raise ValueError("inverse of a non-square matrix")
    ident = Matrix.identity(n).rows
    red, pivots = rref([list(r) + list(e) for r, e in zip(a.rows, ident)])
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return Matrix._raw([r[n:] for r in red])


def span_rank(vectors: Sequence[Sequence]) -> int:
    return rank([list(v) for v in vectors]) if vectors else 0


def same_span(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    ra, rb = span_rank(a), span_rank(b)
    return ra == rb == span_rank(list(a) + list(b))


# ---------------------------------------------------------------------------
# projective rationality


@dataclass(frozen=True)
class Verdict:
    """Outcome of a projective rationality test.

    ``scale`` is a t with t*p rational (RATIONAL case); ``witness`` is an
    index pair (i, j) with p_i / p_j irrational (IRRATIONAL case).
    """

    rational: bool
    scale: object = None
    witness: tuple[int, int] | None = None

    @property
    def label(self) -> str:
        return "RATIONAL" if self.rational else "IRRATIONAL"

    def as_dict(self) -> dict:
        out: dict = {"verdict": self.label}
        if self.rational:
            out["scale"] = format_scalar(self.scale)
        else:
            out["witness"] = list(self.witness)
        return out


class ProjectivePoint:
    """A nonzero exact coefficient vector taken up to scalar multiples."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        c = tuple(as_exact(x) for x in coeffs)
        if all(_zero(x) for x in c):
            raise ValueError("the zero vector is not a projective point")
        object.__setattr__(self, "coeffs", c)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjectivePoint) or len(other) != len(self):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        return all(_zero(a[i] * b[j] - a[j] * b[i]) for i in range(len(a)) for j in range(i + 1, len(a)))

    def __hash__(self):
        return hash(len(self.coeffs))

    def __repr__(self) -> str:
        return "ProjectivePoint([" + ", ".join(format_scalar(x) for x in self.coeffs) + "])"

    def normalized(self) -> tuple:
        """Coefficients scaled so the first nonzero one equals 1."""
        lead = next(x for x in self.coeffs if not _zero(x))
        inv = 1 / lead
        return tuple(x * inv for x in self.coeffs)

    def is_rational(self) -> Verdict:
        return projective_is_rational(self)


def projective_is_rational(p: ProjectivePoint | Sequence) -> Verdict:
    """Decide whether the projective point p has a rational representative.

    Writing p = u + w*sqrt(d) componentwise, p is rational iff the rows u, w
    span a space of dimension <= 1.
    """
    if not isinstance(p, ProjectivePoint):
        p = ProjectivePoint(p)
    c = p.coeffs
    field_of(c)
    j = next(i for i, x in enumerate(c) if not _zero(x))
    uj, wj = parts(c[j])
    for i, x in enumerate(c):
        ui, wi = parts(x)
        if ui * wj - uj * wi != 0:
            return Verdict(False, witness=(i, j))
    return Verdict(True, scale=1 / c[j])


def eigensplit_sqrt(k: Matrix, lam) -> tuple[list[tuple], list[tuple], object]:
    """Split the space into the +sqrt(lam) and -sqrt(lam) eigenspaces of K.

    Requires K @ K == lam * I exactly.  Returns (E_plus, E_minus, root).
    The root is taken inside the field of K when possible; a rational K may
    pick up a fresh sqrt.  Anything else needs a compositum and is refused.
    """
    n = k.shape[0]
    lam = as_exact(lam)
    if k @ k != Matrix.identity(n).scale(lam):
        raise ValueError("K @ K is not lam * I")
    if float(lam) <= 0:
        raise ValueError("lam must be positive; use the complex-pair path")
    root = qsqrt(lam)
    if root is None:
        raise FieldMismatchError(f"sqrt({format_scalar(lam)}) is not in the field of K")
    _join(k.field, field_of([root]))
    ident = Matrix.identity(n)
    plus = exact_kernel(k - ident.scale(root))
    minus = exact_kernel(k + ident.scale(root))
    if len(plus) + len(minus) != n:
        raise ArithmeticError("eigenspaces do not fill the space")
    return plus, minus, root


# ---------------------------------------------------------------------------
# float screening


def continued_fraction_convergents(x: float, max_terms: int = 64):
    """Yield the convergents p/q of the continued fraction of a float."""
    f = Fraction(x)
    p0, q0, p1, q1 = 0, 1, 1, 0
    for _ in range(max_terms):
        a = math.floor(f)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield Fraction(p1, q1)
        frac = f - a
        if frac == 0:
            return
        f = 1 / frac


def rational_reconstruct(x: float, denominator_bound: int) -> Fraction | None:
    """First convergent p/q of x with q <= bound and |x - p/q| < 1/(q^2 bound)."""
    if not math.isfinite(x):
        raise ValueError("cannot reconstruct a non-finite float")
    if denominator_bound < 1:
        raise ValueError("denominator_bound must be >= 1")
    for c in continued_fraction_convergents(x):
        q = c.denominator
        if q > denominator_bound:
            return None
        if abs(Fraction(x) - c) < Fraction(1, q * q * denominator_bound):
            return c
    return None
