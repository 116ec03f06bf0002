"""Trivectors in six dimensions: the splitting operator K, the quartic
invariant, the two 3-planes of a semistable trivector and their Plücker
coordinates, and the rationality certificate built from them."""
from __future__ import annotations

import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .exact import (
    Matrix,
    ProjectivePoint,
    Verdict,
    as_exact,
    eigensplit_sqrt,
    exact_sign,
    format_scalar,
    is_rational,
    parse_scalar,
    projective_is_rational,
    rank,
)
from .search import Annealing, SearchReport

DIM = 6
TRIPLES: tuple[tuple[int, int, int], ...] = tuple(combinations(range(DIM), 3))
TRIPLE_INDEX = {t: i for i, t in enumerate(TRIPLES)}
#: Triples i < j < k <= 5 (1-based), the coordinates constrained by the basis search.
SEARCH_TRIPLES = tuple(combinations(range(5), 3))


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting idx, and the sorted tuple (sign 0 on repeats)."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign, tuple(sorted(idx))


def wedge(a: dict, b: dict) -> dict:
    """Exterior product of forms stored as {sorted index tuple: coefficient}."""
    out: dict = {}
    for ia, ca in a.items():
        for ib, cb in b.items():
            s, key = _sort_sign(ia + ib)
            if s:
                out[key] = out.get(key, 0) + s * ca * cb
    return {k: v for k, v in out.items() if v != 0}


def contract(i: int, form: dict) -> dict:
    """Interior product of the i-th basis (co)vector with a form."""
    out: dict = {}
    for idx, c in form.items():
        if i in idx:
            pos = idx.index(i)
            key = idx[:pos] + idx[pos + 1:]
            out[key] = out.get(key, 0) + (-1) ** pos * c
    return {k: v for k, v in out.items() if v != 0}


class Trivector:
    """x = sum x_abc e_a ^ e_b ^ e_c over a < b < c, coefficients in lex order of triples."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        c = tuple(as_exact(v) for v in coeffs)
        if len(c) != len(TRIPLES):
            raise ValueError(f"a trivector has {len(TRIPLES)} coefficients, got {len(c)}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, terms: dict) -> Trivector:
        """Build from {(a, b, c): coefficient} with 0-based, possibly unsorted indices."""
        vec = [Fraction(0)] * len(TRIPLES)
        for idx, v in terms.items():
            s, key = _sort_sign(idx)
            if not s:
                continue
            vec[TRIPLE_INDEX[key]] = vec[TRIPLE_INDEX[key]] + s * as_exact(v)
        return cls(vec)

    @classmethod
    def standard(cls) -> Trivector:
        """w = e1^e2^e3 + e4^e5^e6."""
        return cls.from_terms({(0, 1, 2): 1, (3, 4, 5): 1})

    @classmethod
    def parse(cls, text: str, d: int | None = None) -> Trivector:
        tokens = [t for t in re.split(r"\s+", text.strip()) if t and not t.startswith("#")]
        return cls([parse_scalar(t, d) for t in tokens])

    def to_text(self) -> str:
        return " ".join(format_scalar(c).replace(" ", "") for c in self.coeffs)

    def as_form(self) -> dict:
        return {t: c for t, c in zip(TRIPLES, self.coeffs) if c != 0}

    def __getitem__(self, triple: tuple[int, int, int]):
        return self.coeffs[TRIPLE_INDEX[triple]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trivector):
            return NotImplemented
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(len(self.coeffs))

    def __add__(self, other: Trivector) -> Trivector:
        return Trivector([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: Trivector) -> Trivector:
        return Trivector([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, t) -> Trivector:
        t = as_exact(t)
        return Trivector([t * a for a in self.coeffs])

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __repr__(self) -> str:
        terms = [f"{format_scalar(c)}*e{a + 1}{b + 1}{c_ + 1}" for (a, b, c_), c in zip(TRIPLES, self.coeffs) if c != 0]
        return "Trivector(" + (" + ".join(terms) or "0") + ")"


def act(g: Matrix, x: Trivector) -> Trivector:
    """The induced action on wedge^3: e_a ^ e_b ^ e_c -> g e_a ^ g e_b ^ g e_c."""
    if g.shape != (DIM, DIM):
        raise ValueError("expected a 6x6 matrix")
    out = []
    for rows in TRIPLES:
        acc = Fraction(0)
        for cols, c in zip(TRIPLES, x.coeffs):
            if c != 0:
                acc = acc + c * _minor(g, rows, cols)
        out.append(acc)
    return Trivector(out)


def _minor(g: Matrix, rows: Sequence[int], cols: Sequence[int]):
    (a, b, c), (p, q, r) = rows, cols
    m = g.rows
    return (
        m[a][p] * (m[b][q] * m[c][r] - m[b][r] * m[c][q])
        - m[a][q] * (m[b][p] * m[c][r] - m[b][r] * m[c][p])
        + m[a][r] * (m[b][p] * m[c][q] - m[b][q] * m[c][p])
    )


def k_operator(x: Trivector) -> Matrix:
    """The splitting operator K_x, an endomorphism of the 6-space.

    For a covector index a, (i_a x) ^ x is a 5-vector; reading it against
    the volume form gives a covector, i.e. a map on the dual space.  K_x is
    its transpose, which makes K_{gx} = det(g) g K_x g^{-1}.
    """
    form = x.as_form()
    full = tuple(range(DIM))
    dual = [[Fraction(0)] * DIM for _ in range(DIM)]
    for a in range(DIM):
        five = wedge(contract(a, form), form)
        for m in range(DIM):
            key = full[:m] + full[m + 1:]
            dual[m][a] = (-1) ** m * five.get(key, Fraction(0))
    return Matrix(dual).T


def quartic_lambda(x: Trivector):
    """tr(K_x^2) / 6, normalized so that lambda(w) = 1."""
    k = k_operator(x)
    return (k @ k).trace() / 6


def is_decomposable(x: Trivector) -> bool:
    """Plücker test: (i_alpha x) ^ x = 0 for every basis 2-covector alpha."""
    form = x.as_form()
    for a, b in combinations(range(DIM), 2):
        if wedge(contract(a, contract(b, form)), form):
            return False
    return True


def wedge_square(x: Trivector) -> dict:
    return wedge(x.as_form(), x.as_form())


def plane_trivector(basis: Sequence[Sequence]) -> Trivector:
    """e_1' ^ e_2' ^ e_3' for three basis vectors of a 3-plane."""
    form = {(): Fraction(1)}
    for v in basis:
        form = wedge(form, {(i,): as_exact(c) for i, c in enumerate(v) if as_exact(c) != 0})
    return Trivector([form.get(t, Fraction(0)) for t in TRIPLES])


def plucker(basis: Sequence[Sequence]) -> ProjectivePoint:
    """The 20 maximal minors of the 3x6 matrix whose rows span the plane."""
    if len(basis) != 3 or any(len(v) != DIM for v in basis) or rank([list(v) for v in basis]) != 3:
        raise ValueError("plucker needs three independent vectors in 6-space")
    return ProjectivePoint(plane_trivector(basis).coeffs)


def plucker_relations(p: ProjectivePoint) -> bool:
    return is_decomposable(Trivector(p.coeffs))


def pair_point(p1: ProjectivePoint, p2: ProjectivePoint) -> ProjectivePoint:
    """Symmetrized coordinates p1_i p2_j + p1_j p2_i, i <= j, of an unordered pair."""
    a, b = p1.coeffs, p2.coeffs
    n = len(a)
    return ProjectivePoint([a[i] * b[j] + a[j] * b[i] for i in range(n) for j in range(i, n)])


class NotSemistableError(ValueError):
    pass


@dataclass
class Decomposition:
    lam: object
    reality: str
    k: Matrix
    e1: list[tuple] = field(default_factory=list)
    e2: list[tuple] = field(default_factory=list)
    omega1: Trivector | None = None
    omega2: Trivector | None = None
    planes: list[list[tuple]] = field(default_factory=list)


def decompose_trivector(x: Trivector) -> Decomposition:
    """Split x = x1 + x2 along the eigenspaces of K_x (lambda > 0).

    For lambda < 0 the eigenvalues form a conjugate pair; the result then
    carries three K-stable real 2-planes instead of E1, E2.
    """
    k = k_operator(x)
    lam = (k @ k).trace() / 6
    if lam == 0:
        raise NotSemistableError("lambda(x) = 0: the trivector is not semistable")
    if exact_sign(lam) < 0:
        return Decomposition(lam, "COMPLEX_PAIR", k, planes=_stable_planes(k))
    e1, e2, _ = eigensplit_sqrt(k, lam)
    p = Matrix.from_columns(list(e1) + list(e2))
    local = act(p.inv(), x)
    parts = [{}, {}]
    for t, c in zip(TRIPLES, local.coeffs):
        if c == 0:
            continue
        if t == (0, 1, 2):
            parts[0][t] = c
        elif t == (3, 4, 5):
            parts[1][t] = c
        else:
            raise ArithmeticError(f"mixed component {t} survives in the eigenbasis")
    omega1 = act(p, Trivector.from_terms(parts[0]))
    omega2 = act(p, Trivector.from_terms(parts[1]))
    return Decomposition(lam, "REAL_SPLIT", k, list(e1), list(e2), omega1, omega2)


def _stable_planes(k: Matrix) -> list[list[tuple]]:
    planes: list[list[tuple]] = []
    span: list[tuple] = []
    for i in range(DIM):
        v = tuple(Fraction(int(i == j)) for j in range(DIM))
        kv = k @ v
        if rank([list(u) for u in span + [v, kv]]) == len(span) + 2:
            planes.append([v, kv])
            span += [v, kv]
    return planes


@dataclass(frozen=True)
class Theorem11Certificate:
    reality: str
    verdict_e1: Verdict | None = None
    verdict_e2: Verdict | None = None
    verdict_pair: Verdict | None = None

    @property
    def sufficiently_irrational(self) -> bool:
        if self.reality != "REAL_SPLIT":
            return False
        return not (self.verdict_e1.rational or self.verdict_e2.rational or self.verdict_pair.rational)

    def as_dict(self) -> dict:
        out: dict = {"case": "TRIVECTOR", "reality": self.reality}
        if self.reality == "REAL_SPLIT":
            out.update(
                E1=self.verdict_e1.as_dict(),
                E2=self.verdict_e2.as_dict(),
                pair=self.verdict_pair.as_dict(),
            )
        out["sufficiently_irrational"] = self.sufficiently_irrational
        return out


def certify_theorem11(x: Trivector) -> Theorem11Certificate:
    if not isinstance(x, Trivector):
        raise TypeError("certify_theorem11 needs an exact Trivector")
    dec = decompose_trivector(x)
    if dec.reality != "REAL_SPLIT":
        return Theorem11Certificate(dec.reality)
    p1, p2 = plucker(dec.e1), plucker(dec.e2)
    return Theorem11Certificate(
        "REAL_SPLIT",
        projective_is_rational(p1),
        projective_is_rational(p2),
        projective_is_rational(pair_point(p1, p2)),
    )


def eval_trivector(x, u: Sequence, v: Sequence, t: Sequence):
    """x(u, v, t) = sum_abc x_abc det[[u_a u_b u_c], [v_a ...], [t_a ...]]."""
    coeffs = x.coeffs if isinstance(x, Trivector) else x
    total = 0
    for (a, b, c), xc in zip(TRIPLES, coeffs):
        if xc == 0:
            continue
        d = (
            u[a] * (v[b] * t[c] - v[c] * t[b])
            - u[b] * (v[a] * t[c] - v[c] * t[a])
            + u[c] * (v[a] * t[b] - v[b] * t[a])
        )
        total = total + xc * d
    return total


def transform_coordinates(x, basis) -> list:
    """All 20 values x(u_i, u_j, u_k), i < j < k, for the rows u_i of ``basis``."""
    b = [list(r) for r in (basis.rows if isinstance(basis, Matrix) else basis)]
    return [eval_trivector(x, b[i], b[j], b[k]) for i, j, k in TRIPLES]


def as_float_array(x) -> np.ndarray:
    coeffs = x.coeffs if isinstance(x, Trivector) else x
    return np.array([float(c) for c in coeffs], dtype=float)


# ---------------------------------------------------------------------------
# basis search


def _dense(x) -> tuple[np.ndarray, int]:
    """Antisymmetric 6x6x6 float tensor of x and the common denominator used.

    Rational coefficients are cleared to integers so that small bases give
    exact float arithmetic.
    """
    raw = x.coeffs if isinstance(x, Trivector) else x
    coeffs = [c if isinstance(c, (float, np.floating)) else as_exact(c) for c in raw]
    den = 1
    if not any(isinstance(c, (float, np.floating)) for c in coeffs) and all(is_rational(c) for c in coeffs):
        for c in coeffs:
            q = Fraction(c)
            den = den * q.denominator // math.gcd(den, q.denominator)
    t = np.zeros((DIM,) * 3)
    for (a, b, c), v in zip(TRIPLES, coeffs):
        val = float(v * den)
        for perm, sgn in _PERMS:
            t[tuple((a, b, c)[k] for k in perm)] = sgn * val
    return t, den


_PERMS = (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1), ((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1))
_SA, _SB, _SC = (np.array(v) for v in zip(*SEARCH_TRIPLES))
GENERATORS = tuple((i, j, s) for i in range(DIM) for j in range(DIM) if i != j for s in (1, -1))


def _move(y: np.ndarray, i: int, j: int, s: int) -> np.ndarray:
    """Coordinates after the row operation u_i -> u_i + s u_j."""
    y = y.copy()
    y[i] += s * y[j]
    y[:, i] += s * y[:, j]
    y[:, :, i] += s * y[:, :, j]
    return y


def _restart(t, den, y_target, budget, seed, r, schedule, width, kick):
    """One restart: an annealed kick away from the identity, then beam descent.

    Candidates are ranked by the summed error, which vanishes exactly when
    the max-error does but is far less flat.  Returns (best max-error,
    basis, evaluations, trace).
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, r]))

    def score(y):
        err = np.abs(y_target - y[_SA, _SB, _SC] / den)
        return float(err.sum()), float(err.max())

    u = np.eye(DIM, dtype=np.int64)
    cur_y = t
    cur, best = score(cur_y)
    best_u = u.copy()
    trace = [(1, best)]
    evals = 1
    scale = cur if cur > 0 else 1.0
    for step in range(1, kick * (r > 0) + 1):
        if evals >= budget or best == 0:
            break
        i, j, s = GENERATORS[rng.integers(len(GENERATORS))]
        y = _move(cur_y, i, j, s)
        e, m = score(y)
        evals += 1
        if e <= cur or rng.random() < math.exp(-(e - cur) / (scale * schedule.temperature(step))):
            cur, cur_y = e, y
            u[i] += s * u[j]
            if m < best:
                best, best_u = m, u.copy()
                trace.append((evals, m))
    beam = [(cur, cur_y, u)]
    seen = {u.tobytes()}
    while evals < budget and best > 0 and beam:
        cands = []
        for _, y0, u0 in beam:
            for i, j, s in GENERATORS:
                if evals >= budget or best == 0:
                    break
                v = u0.copy()
                v[i] += s * v[j]
                key = v.tobytes()
                if key in seen:
                    continue
                seen.add(key)
                y = _move(y0, i, j, s)
                e, m = score(y)
                evals += 1
                if m < best:
                    best, best_u = m, v
                    trace.append((evals, m))
                cands.append((e, len(cands), y, v))
        cands.sort(key=lambda c: (c[0], c[1]))
        beam = [(e, y, v) for e, _, y, v in cands[:width]]
    return best, best_u, evals, trace


def basis_search(
    x,
    y: Sequence[float],
    eps: float,
    budget: int,
    seed: int = 0,
    restarts: int = 2,
    schedule: Annealing | None = None,
    width: int = 300,
    kick: int = 30,
    workers: int = 1,
) -> SearchReport:
    """Look for a Z-basis u_1..u_6 with |y_ijk - x(u_i, u_j, u_k)| < eps for i<j<k<=5.

    Moves are the 60 elementary operations u_i -> u_i +- u_j.  Restart r
    walks ``kick`` annealed steps from the identity (none for r = 0), then
    runs a beam descent of the given width.  Restarts share the budget and
    are merged by best objective, lowest index first.  A restart stops once
    it reaches objective 0, and later restarts are then not counted.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if budget < 1 or restarts < 1 or width < 1:
        raise ValueError("budget, restarts and width must be >= 1")
    y_target = np.array([float(v) for v in y])
    if y_target.shape != (len(SEARCH_TRIPLES),):
        raise ValueError(f"expected {len(SEARCH_TRIPLES)} targets, got {y_target.shape}")
    schedule = schedule or Annealing(t0=0.05, cooling=0.95, t_min=1e-6)
    t, den = _dense(x)
    share = [budget // restarts + (r < budget % restarts) for r in range(restarts)]
    jobs = [(t, den, y_target, max(share[r], 1), seed, r, schedule, width, kick) for r in range(restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_restart, *zip(*jobs)))
    else:
        runs = []
        for job in jobs:
            runs.append(_restart(*job))
            if runs[-1][0] == 0:
                break
    best = None
    trace: list[tuple[int, float]] = []
    offset = 0
    for r, (obj, u, evals, tr) in enumerate(runs):
        for i, e in tr:
            if not trace or e < trace[-1][1]:
                trace.append((offset + i, e))
        offset += evals
        if best is None or obj < best[0]:
            best = (obj, u, r)
        if obj == 0:
            break
    obj, u, winner = best
    basis = Matrix(u.tolist())
    values = [float(v) for v in _coordinates(x, basis)]
    error = max(abs(a - b) for a, b in zip(y_target.tolist(), values))
    report = SearchReport(
        "TRIVECTOR", y_target.tolist(), tuple(map(tuple, u.tolist())), values, error, offset, budget, seed, trace
    )
    report.params.update(
        eps=eps,
        success=error < eps,
        restarts=restarts,
        winner=winner,
        width=width,
        kick=kick,
        t0=schedule.t0,
        cooling=schedule.cooling,
        det=int(basis.det()),
    )
    return report


def _coordinates(x, basis: Matrix) -> list:
    """x(u_i, u_j, u_k) for the search triples, exactly when x is exact."""
    rows = [list(r) for r in basis.rows]
    return [eval_trivector(x, rows[i], rows[j], rows[k]) for i, j, k in SEARCH_TRIPLES]
