"""Polynomial invariants of small representations, derived by linear algebra.

Invariants of degree ``k`` are the common kernel of the derivations induced
by a generating set of the Lie algebra (raising and lowering operators) on
homogeneous polynomials.  Only zero-weight monomials can contribute, so the
search space is cut to those first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .actions import Poly, monomials, poly_pullback, sym_power_action, sym_power_differential
from .exact import (
    Matrix,
    ProjectivePoint,
    Verdict,
    as_exact,
    exact_kernel,
    projective_is_rational,
)

MAX_DEGREE = 4


@dataclass(frozen=True)
class Representation:
    name: str
    dim: int
    generators: tuple[Matrix, ...]
    weights: tuple[tuple[int, ...], ...]
    group_matrix: Callable[[Matrix], Matrix]


def _sym(deg: int) -> Representation:
    e = sym_power_differential(Matrix([[0, 1], [0, 0]]), deg)
    f = sym_power_differential(Matrix([[0, 0], [1, 0]]), deg)
    h = sym_power_differential(Matrix([[1, 0], [0, -1]]), deg)
    weights = tuple((int(h[i, i]),) for i in range(deg + 1))
    return Representation(f"SYM{deg}", deg + 1, (e, f), weights, lambda s: sym_power_action(s, deg))


# sl(3) coordinates: E01, E02, E10, E12, E20, E21, diag(1,-1,0), diag(0,1,-1)
SL3_OFFDIAG = ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))


def sl3_basis() -> list[Matrix]:
    out = []
    for i, j in SL3_OFFDIAG:
        m = [[0] * 3 for _ in range(3)]
        m[i][j] = 1
        out.append(Matrix(m))
    out.append(Matrix.diag([1, -1, 0]))
    out.append(Matrix.diag([0, 1, -1]))
    return out


def sl3_coords(x: Matrix) -> tuple:
    """Coordinates of a traceless 3x3 matrix in the fixed 8-element basis."""
    if x.trace() != 0:
        raise ValueError("sl(3) coordinates need a traceless matrix")
    return tuple(x[i, j] for i, j in SL3_OFFDIAG) + (x[0, 0], -x[2, 2])


def sl3_from_coords(c: Sequence) -> Matrix:
    c = [as_exact(v) for v in c]
    x = [[Fraction(0)] * 3 for _ in range(3)]
    for (i, j), v in zip(SL3_OFFDIAG, c):
        x[i][j] = v
    a, b = c[6], c[7]
    x[0][0], x[1][1], x[2][2] = a, b - a, -b
    return Matrix(x)


def adjoint_matrix(g: Matrix) -> Matrix:
    """The 8x8 matrix of X -> g X g^{-1} in sl(3) coordinates."""
    gi = g.inv()
    return Matrix.from_columns([sl3_coords(g @ b @ gi) for b in sl3_basis()])


def _ad_coords(y: Matrix) -> Matrix:
    return Matrix.from_columns([sl3_coords(y @ b - b @ y) for b in sl3_basis()])


def _adjoint_sl3() -> Representation:
    basis = sl3_basis()
    gens = tuple(_ad_coords(basis[k]) for k in (0, 3, 2, 5))  # E01, E12, E10, E21
    h1, h2 = _ad_coords(basis[6]), _ad_coords(basis[7])
    weights = tuple((int(h1[i, i]), int(h2[i, i])) for i in range(8))
    return Representation("ADJOINT_SL3", 8, gens, weights, adjoint_matrix)


@lru_cache(maxsize=None)
def representation(name: str) -> Representation:
    table = {"SYM3": lambda: _sym(3), "SYM4": lambda: _sym(4), "ADJOINT_SL3": _adjoint_sl3}
    if name not in table:
        raise ValueError(f"unsupported representation {name!r}; choose from {sorted(table)}")
    return table[name]()


def derivation(p: Poly, a: Matrix) -> Poly:
    """sum_i (a x)_i dp/dx_i, the infinitesimal action of a on p (up to sign)."""
    out: dict = {}
    n = p.n
    for e, c in p.coeffs.items():
        for i in range(n):
            if not e[i]:
                continue
            for j in range(n):
                aij = a[i, j]
                if aij == 0:
                    continue
                f = list(e)
                f[i] -= 1
                f[j] += 1
                f = tuple(f)
                out[f] = out.get(f, 0) + c * e[i] * aij
    return Poly(n, p.deg, out)


def normalize_integral(vec: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers with first nonzero entry positive."""
    vec = [Fraction(v) for v in vec]
    lcm = 1
    for v in vec:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v)
    return tuple(-v for v in ints) if lead < 0 else tuple(ints)


@lru_cache(maxsize=None)
def solve_invariants(rep: str, degree: int) -> tuple[Poly, ...]:
    """Rational basis of the degree-``degree`` invariant polynomials of ``rep``."""
    r = representation(rep)
    if not 1 <= degree <= MAX_DEGREE:
        raise ValueError(f"degree must be between 1 and {MAX_DEGREE}")
    n = r.dim
    all_monos = monomials(n, degree)
    zero = tuple(0 for _ in r.weights[0])
    domain = [
        e
        for e in all_monos
        if tuple(sum(k * w[t] for k, w in zip(e, r.weights)) for t in range(len(zero))) == zero
    ]
    if not domain:
        return ()
    images = [[derivation(Poly(n, degree, {e: 1}), a) for e in domain] for a in r.generators]
    rows = []
    for per_gen in images:
        touched = sorted({f for img in per_gen for f in img.coeffs}, reverse=True)
        for f in touched:
            rows.append([img.coeffs.get(f, Fraction(0)) for img in per_gen])
    kernel = exact_kernel(rows) if rows else [
        tuple(Fraction(int(i == j)) for j in range(len(domain))) for i in range(len(domain))
    ]
    out = []
    for v in kernel:
        ints = normalize_integral(v)
        out.append(Poly(n, degree, dict(zip(domain, ints))))
    # present in monomial order of the leading term
    index = {e: i for i, e in enumerate(all_monos)}
    out.sort(key=lambda p: min(index[e] for e in p.coeffs))
    return tuple(_canonical(p) for p in out)


def _canonical(p: Poly) -> Poly:
    vec = p.vector()
    return Poly.from_vector(p.n, p.deg, normalize_integral(vec))


@dataclass(frozen=True)
class InvariantPair:
    Q: Poly
    F: Poly
    rep: str


@lru_cache(maxsize=None)
def invariant_pair(rep: str) -> InvariantPair:
    q, f = solve_invariants(rep, 2), solve_invariants(rep, 3)
    if len(q) != 1 or len(f) != 1:
        raise ArithmeticError(f"{rep}: expected one quadratic and one cubic invariant")
    return InvariantPair(q[0], f[0], rep)


def quartic_QF(x: Sequence) -> tuple:
    """(Q, F) of a binary quartic with coefficients of v1^(4-i) v2^i."""
    if len(x) != 5:
        raise ValueError("a binary quartic has 5 coefficients")
    pair = invariant_pair("SYM4")
    x = [as_exact(v) for v in x]
    return pair.Q(x), pair.F(x)


def sl3_QF(x: Matrix) -> tuple:
    """(tr X^2, det X) of a traceless 3x3 matrix."""
    if x.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    if x.trace() != 0:
        raise ValueError("X must be traceless")
    return (x @ x).trace(), x.det()


CASE_REPS = {"SYM4": "SYM4", "ADJ_SL3": "ADJOINT_SL3", "ADJOINT_SL3": "ADJOINT_SL3"}


@dataclass(frozen=True)
class Theorem15Certificate:
    q_verdict: Verdict
    case: str

    @property
    def irrational(self) -> bool:
        return not self.q_verdict.rational

    @property
    def sufficiently_irrational(self) -> bool:
        return self.irrational

    def as_dict(self) -> dict:
        return {"case": self.case, "Q": self.q_verdict.as_dict(), "irrational": self.irrational}


def certify_theorem15(g: Matrix, case: str) -> Theorem15Certificate:
    """Decide whether the quadratic form Q(g^{-1} x) is irrational."""
    if case not in CASE_REPS:
        raise ValueError(f"unknown case {case!r}")
    rep = representation(CASE_REPS[case])
    g = g if isinstance(g, Matrix) else Matrix(g)
    if g.shape != (rep.dim, rep.dim):
        raise ValueError(f"{case} needs a {rep.dim}x{rep.dim} matrix, got {g.shape}")
    q = poly_pullback(invariant_pair(rep.name).Q, g)
    return Theorem15Certificate(projective_is_rational(ProjectivePoint(q.vector())), case)
