"""Searches for primitive integer points where a polynomial comes close to
given targets: exhaustive box scans, annealed walks on SL(n, Z)-orbits, and
the quadratic-form baseline."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .actions import Poly, is_primitive, primitive_shard
from .exact import Matrix, as_exact, exact_sign, field_of, parts, projective_is_rational

REPORT_FIELDS = (
    "case",
    "target",
    "best_point",
    "best_value",
    "error",
    "evaluations",
    "radius_or_budget",
    "seed",
    "trace",
)


@dataclass
class SearchReport:
    case: str
    target: float | list[float]
    best_point: tuple
    best_value: float | list[float]
    error: float
    evaluations: int
    radius_or_budget: int
    seed: int | None = None
    trace: list[tuple[int, float]] = field(default_factory=list)
    params: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "target": _floats(self.target),
            "best_point": _ints(self.best_point),
            "best_value": _floats(self.best_value),
            "error": self.error,
            "evaluations": self.evaluations,
            "radius_or_budget": self.radius_or_budget,
            "seed": self.seed,
            "trace": [[int(i), float(e)] for i, e in self.trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> SearchReport:
        if set(data) != set(REPORT_FIELDS):
            raise ValueError(f"report fields must be exactly {REPORT_FIELDS}")
        return cls(
            data["case"],
            _floats(data["target"]),
            _tuples(data["best_point"]),
            _floats(data["best_value"]),
            float(data["error"]),
            int(data["evaluations"]),
            int(data["radius_or_budget"]),
            data["seed"],
            [(int(i), float(e)) for i, e in data["trace"]],
        )

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["evaluation", "best_error"])
        for i, e in self.trace:
            w.writerow([i, repr(float(e))])
        return buf.getvalue()


def _ints(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_ints(t) for t in v]
    return int(v)


def _floats(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_floats(t) for t in v]
    return float(v)


def _tuples(v):
    if isinstance(v, list):
        return tuple(_tuples(t) for t in v)
    return v


# ---------------------------------------------------------------------------
# value functions


class ValueFunction:
    """An integer-point evaluator with an optional vectorized twin."""

    def __init__(self, n: int, evaluate: Callable[[Sequence[int]], float], batch=None, name: str = ""):
        self.n = n
        self._evaluate = evaluate
        self._batch = batch
        self.name = name

    def __call__(self, x: Sequence[int]) -> float:
        return self._evaluate(x)

    def batch(self, pts: np.ndarray) -> np.ndarray:
        if self._batch is not None:
            return self._batch(pts)
        return np.array([self._evaluate(tuple(int(v) for v in p)) for p in pts], dtype=float)


class PolynomialValue(ValueFunction):
    """x -> P(x) for a polynomial with coefficients in Q(sqrt(d)).

    The value is assembled exactly as (U + W sqrt(d)) / D with integers U, W
    and only then converted to float, so scalar and batch evaluation give
    bit-identical results.
    """

    def __init__(self, poly: Poly, name: str = ""):
        coeffs = list(poly.coeffs.items())
        d = field_of(c for _, c in coeffs)
        den = 1
        for _, c in coeffs:
            for q in parts(c):
                den = den * q.denominator // math.gcd(den, q.denominator)
        self.n = poly.n
        self.deg = poly.deg
        self.name = name
        self.d = d
        self.den = den
        self.exps = np.array([e for e, _ in coeffs], dtype=np.int64).reshape(len(coeffs), poly.n)
        self.rat = [int(parts(c)[0] * den) for _, c in coeffs]
        self.irr = [int(parts(c)[1] * den) for _, c in coeffs]
        self.sqrt_d = math.sqrt(d) if d else 0.0
        self._batch = None

    def _finish(self, u, w):
        if self.d:
            return (float(u) + float(w) * self.sqrt_d) / float(self.den)
        return float(u) / float(self.den)

    def exact(self, x: Sequence[int]):
        """The exact value as (U, W, D)."""
        u = w = 0
        for e, a, b in zip(self.exps.tolist(), self.rat, self.irr):
            m = 1
            for xi, k in zip(x, e):
                if k:
                    m *= int(xi) ** k
            u += a * m
            w += b * m
        return u, w, self.den

    def __call__(self, x: Sequence[int]) -> float:
        u, w, _ = self.exact(x)
        return self._finish(u, w)

    def batch(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.int64)
        if len(pts) == 0:
            return np.zeros(0)
        radius = int(np.abs(pts).max())
        bound = max(sum(abs(a) for a in self.rat), sum(abs(b) for b in self.irr)) * max(radius, 1) ** self.deg
        dtype = np.int64 if bound < 2**62 else object
        cols = pts.astype(dtype)
        powers = [[np.ones(len(pts), dtype=dtype)] for _ in range(self.n)]
        for i in range(self.n):
            for _ in range(self.deg):
                powers[i].append(powers[i][-1] * cols[:, i])
        u = np.zeros(len(pts), dtype=dtype)
        w = np.zeros(len(pts), dtype=dtype)
        for e, a, b in zip(self.exps.tolist(), self.rat, self.irr):
            m = None
            for i, k in enumerate(e):
                if k:
                    m = powers[i][k] if m is None else m * powers[i][k]
            if m is None:
                m = powers[0][0]
            if a:
                u = u + a * m
            if b:
                w = w + b * m
        uf = u.astype(float)
        if self.d:
            return (uf + w.astype(float) * self.sqrt_d) / float(self.den)
        return uf / float(self.den)


# ---------------------------------------------------------------------------
# box search


def _records(err: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices and values where err beats every earlier entry (strictly)."""
    if len(err) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    run = np.minimum.accumulate(err)
    prev = np.concatenate(([np.inf], run[:-1]))
    idx = np.nonzero(err < prev)[0]
    return idx, err[idx]


def _scan_shard(args):
    f, n, big, lead, radii, targets = args
    pts = primitive_shard(n, big, lead)
    if len(pts):
        vals = f.batch(pts)
        norms = np.abs(pts).max(axis=1)
    else:
        vals = np.zeros(0)
        norms = np.zeros(0, dtype=np.int64)
    out = []
    for r in radii:
        if abs(lead) > r:
            out.append(None)
            continue
        mask = norms <= r
        sub_pts, sub_vals = pts[mask], vals[mask]
        per_target = []
        for t in targets:
            idx, errs = _records(np.abs(sub_vals - t))
            per_target.append(
                (
                    [tuple(int(v) for v in sub_pts[i]) for i in idx],
                    [float(sub_vals[i]) for i in idx],
                    idx.tolist(),
                    errs.tolist(),
                )
            )
        out.append((len(sub_pts), per_target))
    return out


def box_scan(
    f: ValueFunction,
    radii: Sequence[int],
    targets: Sequence[float],
    case: str = "",
    workers: int = 1,
) -> dict[int, list[SearchReport]]:
    """Exhaustive scan of nested boxes; one report per (radius, target).

    Shards are the leading coordinates -R..R; results are merged in that
    order, so the outcome does not depend on ``workers``.
    """
    radii = sorted(set(int(r) for r in radii))
    if not radii or radii[0] < 1:
        raise ValueError("radii must be >= 1")
    big = radii[-1]
    targets = [float(t) for t in targets]
    jobs = [(f, f.n, big, lead, radii, targets) for lead in range(-big, big + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(_scan_shard, jobs))
    else:
        shards = [_scan_shard(j) for j in jobs]
    result: dict[int, list[SearchReport]] = {}
    for ri, r in enumerate(radii):
        reports = []
        for ti, t in enumerate(targets):
            best_err, best_pt, best_val = math.inf, None, math.nan
            trace: list[tuple[int, float]] = []
            offset = 0
            for shard in shards:
                entry = shard[ri]
                if entry is None:
                    continue
                count, per_target = entry
                pts, vals, idx, errs = per_target[ti]
                for p, v, i, e in zip(pts, vals, idx, errs):
                    if e < best_err:
                        best_err, best_pt, best_val = e, p, v
                        trace.append((offset + i + 1, e))
                offset += count
            reports.append(SearchReport(case, t, best_pt, best_val, best_err, offset, r, None, trace))
        result[r] = reports
    return result


def box_search(
    f: ValueFunction,
    radius: int,
    targets: Sequence[float],
    eps: float | None = None,
    case: str = "",
    workers: int = 1,
) -> list[SearchReport]:
    """Best primitive point in the box |x|_inf <= radius for each target."""
    if eps is not None and eps <= 0:
        raise ValueError("eps must be positive")
    reports = box_scan(f, [radius], targets, case=case, workers=workers)[radius]
    if eps is not None:
        for r in reports:
            r.params["eps"] = eps
            r.params["hit"] = r.error < eps
    return reports


# ---------------------------------------------------------------------------
# annealed walk on the SL(n, Z)-orbit


@dataclass(frozen=True)
class Annealing:
    t0: float = 1.0
    cooling: float = 0.999
    t_min: float = 1e-9

    def temperature(self, step: int) -> float:
        return max(self.t0 * self.cooling**step, self.t_min)


def walk_search(
    f: ValueFunction,
    x0: Sequence[int],
    targets: Sequence[float],
    budget: int,
    seed: int = 0,
    schedule: Annealing = Annealing(),
    case: str = "",
) -> list[SearchReport]:
    """Random walk x -> (I +- E_ij) x with annealed acceptance on |f(x) - t|.

    ``budget`` counts evaluations, the seed point included.
    """
    x0 = tuple(int(v) for v in x0)
    if not is_primitive(x0):
        raise ValueError(f"seed point {x0} is not primitive")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    n = len(x0)
    reports = []
    for ti, t in enumerate(float(v) for v in targets):
        rng = np.random.default_rng(np.random.SeedSequence([seed, ti]))
        cur = list(x0)
        cur_val = f(cur)
        cur_err = abs(cur_val - t)
        best = (cur_err, tuple(cur), cur_val)
        trace = [(1, cur_err)]
        for step in range(1, budget):
            i, j = rng.choice(n, size=2, replace=False)
            sgn = 1 if rng.random() < 0.5 else -1
            cand = list(cur)
            cand[i] += sgn * cand[j]
            val = f(cand)
            err = abs(val - t)
            temp = schedule.temperature(step)
            u = rng.random()
            if err <= cur_err or u < math.exp(-(err - cur_err) / temp):
                cur, cur_val, cur_err = cand, val, err
            if err < best[0]:
                best = (err, tuple(cand), val)
                trace.append((step + 1, err))
        rep = SearchReport(case, t, best[1], best[2], best[0], budget, budget, seed, trace)
        rep.params.update(t0=schedule.t0, cooling=schedule.cooling, start=list(x0))
        reports.append(rep)
    return reports


# ---------------------------------------------------------------------------
# quadratic baseline


class HypothesisError(ValueError):
    """An input violates a hypothesis of the density statement."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        super().__init__(f"hypothesis violated: {hypothesis}" + (f" ({detail})" if detail else ""))


def congruence_diagonal(a: Matrix) -> list:
    """Diagonal of a matrix congruent to the symmetric matrix a (exact)."""
    m = [list(r) for r in a.rows]
    n = len(m)
    diag = []
    for k in range(n):
        if m[k][k] == 0:
            j = next((j for j in range(k + 1, n) if m[j][j] != 0), None)
            if j is not None:
                m[k], m[j] = m[j], m[k]
                for r in m:
                    r[k], r[j] = r[j], r[k]
            else:
                j = next((j for j in range(k + 1, n) if m[k][j] != 0), None)
                if j is not None:
                    # e_k -> e_k + e_j makes the pivot 2 m[k][j]
                    for c in range(n):
                        m[k][c] = m[k][c] + m[j][c]
                    for r in range(n):
                        m[r][k] = m[r][k] + m[r][j]
        piv = m[k][k]
        diag.append(piv)
        if piv == 0:
            continue
        for i in range(k + 1, n):
            if m[i][k] != 0:
                f = m[i][k] / piv
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
                for r in range(n):
                    m[r][i] = m[r][i] - f * m[r][k]
    return diag


def quadratic_poly(a: Matrix) -> Poly:
    """x^T a x as a polynomial."""
    n = a.shape[0]
    coeffs: dict = {}
    for i in range(n):
        for j in range(n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            e = tuple(e)
            coeffs[e] = coeffs.get(e, 0) + a[i, j]
    return Poly(n, 2, coeffs)


def check_oppenheim(a: Matrix) -> None:
    """Raise HypothesisError unless a is an irrational indefinite nondegenerate form, n >= 3."""
    n = a.shape[0]
    if a.shape != (n, n) or a.T != a:
        raise ValueError("the form must be given by a symmetric matrix")
    if n < 3:
        raise HypothesisError("n >= 3", f"n = {n}")
    q = quadratic_poly(a)
    if projective_is_rational([c for c in q.vector()]).rational:
        raise HypothesisError("irrational", "all coefficient ratios are rational")
    signs = [exact_sign(v) for v in congruence_diagonal(a)]
    if 0 in signs:
        raise HypothesisError("non-degenerate", "the form is degenerate")
    if all(s > 0 for s in signs) or all(s < 0 for s in signs):
        raise HypothesisError("indefinite", "the form is definite")


@dataclass
class BaselineResult:
    reports: list[SearchReport]
    curve: dict[float, list[tuple[int, float]]]


def oppenheim_baseline(
    coeffs,
    targets: Sequence[float],
    radius: int,
    workers: int = 1,
) -> BaselineResult:
    """Box search for an irrational indefinite quadratic form.

    ``coeffs`` is either the diagonal (a flat sequence) or a full symmetric
    matrix.  Also records best error against radius for R' = 2, 4, ..., R.
    """
    a = form_matrix(coeffs)
    check_oppenheim(a)
    f = PolynomialValue(quadratic_poly(a), name="baseline")
    radii = sorted(set(list(range(2, radius + 1, 2)) + [radius]))
    scan = box_scan(f, radii, targets, case="BASELINE", workers=workers)
    curve = {float(t): [(r, scan[r][i].error) for r in radii] for i, t in enumerate(targets)}
    return BaselineResult(scan[radius], curve)


def form_matrix(coeffs) -> Matrix:
    if isinstance(coeffs, Matrix):
        return coeffs
    coeffs = list(coeffs)
    if coeffs and isinstance(coeffs[0], (list, tuple)):
        return Matrix(coeffs)
    return Matrix.diag([as_exact(c) for c in coeffs])
