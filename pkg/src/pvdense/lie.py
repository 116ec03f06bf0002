"""sl(2) acting on sl(4) through the cubic embedding, and the intermediate
subalgebra sp(4) preserving the alternating form on binary cubics.

Everything is exact rational linear algebra on flattened 4x4 matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .actions import sym_power_differential
from .cubic import B_FORM
from .exact import Matrix, exact_kernel, same_span, span_rank

N = 4


def bracket(x: Matrix, y: Matrix) -> Matrix:
    return x @ y - y @ x


def flatten(x: Matrix) -> tuple:
    return tuple(v for row in x.rows for v in row)


def unflatten(v, n: int = N) -> Matrix:
    return Matrix([v[i * n:(i + 1) * n] for i in range(n)])


def ad_matrix(x: Matrix) -> Matrix:
    """Matrix of ad(x) acting on flattened n x n matrices."""
    n = x.shape[0]
    cols = []
    for k in range(n * n):
        e = [Fraction(0)] * (n * n)
        e[k] = Fraction(1)
        cols.append(flatten(bracket(x, unflatten(e, n))))
    return Matrix.from_columns(cols)


class TripleRelationError(ValueError):
    pass


@dataclass(frozen=True)
class Sl2Triple:
    E: Matrix
    H: Matrix
    F: Matrix

    def check(self) -> list[str]:
        """Names of violated relations; empty when [H,E]=2E, [H,F]=-2F, [E,F]=H."""
        bad = []
        if bracket(self.H, self.E) != self.E.scale(2):
            bad.append("[H,E] = 2E")
        if bracket(self.H, self.F) != self.F.scale(-2):
            bad.append("[H,F] = -2F")
        if bracket(self.E, self.F) != self.H:
            bad.append("[E,F] = H")
        return bad


def sl2_triple_sym3() -> Sl2Triple:
    e = Matrix([[0, 1], [0, 0]])
    h = Matrix([[1, 0], [0, -1]])
    f = Matrix([[0, 0], [1, 0]])
    return Sl2Triple(*(sym_power_differential(x, 3) for x in (e, h, f)))


def _traceless_row(n: int = N) -> list:
    return [Fraction(int(i == j)) for i in range(n) for j in range(n)]


@dataclass
class IsotypicReport:
    multiplicities: dict[int, int]
    components: dict[int, list[list[Matrix]]] = field(default_factory=dict)

    @property
    def dims(self) -> list[int]:
        return sorted(len(c) for comps in self.components.values() for c in comps)

    def component(self, weight: int, index: int = 0) -> list[Matrix]:
        return self.components[weight][index]


def ad_h_eigenvalues(t: Sl2Triple) -> list[int]:
    """Eigenvalues of ad(H) on sl(4), read off a diagonal H."""
    h = [t.H[i, i] for i in range(N)]
    if any(t.H[i, j] != 0 for i in range(N) for j in range(N) if i != j):
        raise ValueError("H is expected to be diagonal")
    vals = [int(h[i] - h[j]) for i in range(N) for j in range(N)]
    vals.remove(0)
    return sorted(vals)


def isotypic_decomposition(t: Sl2Triple) -> IsotypicReport:
    """Split traceless 4x4 matrices into irreducibles under ad of the triple.

    Highest weight vectors are the kernel of ad(E) inside each ad(H)
    eigenspace; each one generates its component by repeated ad(F).
    """
    bad = t.check()
    if bad:
        raise TripleRelationError("triple relations violated: " + ", ".join(bad))
    ad_e, ad_h = ad_matrix(t.E), ad_matrix(t.H)
    ident = Matrix.identity(N * N)
    weights = sorted({w for w in ad_h_eigenvalues(t) if w >= 0}, reverse=True)
    report = IsotypicReport(multiplicities={})
    for m in weights:
        system = list((ad_h - ident.scale(m)).rows) + list(ad_e.rows) + [_traceless_row()]
        hw = exact_kernel(system)
        if not hw:
            continue
        report.multiplicities[m] = len(hw)
        comps = []
        for v in hw:
            chain = [unflatten(v)]
            while True:
                nxt = bracket(t.F, chain[-1])
                if all(x == 0 for x in flatten(nxt)):
                    break
                chain.append(nxt)
            if len(chain) != m + 1:
                raise ArithmeticError(f"weight {m} vector generated {len(chain)} dims")
            comps.append(chain)
        report.components[m] = comps
    if sum(report.dims) != N * N - 1:
        raise ArithmeticError("components do not fill sl(4)")
    return report


def sp4_from_B(form: Matrix | None = None) -> list[Matrix]:
    """Basis of {X : X^T M + M X = 0} for the matrix M of the form B."""
    m = B_FORM.matrix if form is None else form
    n = m.shape[0]
    cols = []
    for k in range(n * n):
        e = [Fraction(0)] * (n * n)
        e[k] = Fraction(1)
        x = unflatten(e, n)
        cols.append(flatten(x.T @ m + m @ x))
    return [unflatten(v, n) for v in exact_kernel(Matrix.from_columns(cols))]


def contains(span_basis: list[Matrix], vectors: list[Matrix]) -> bool:
    a = [flatten(x) for x in span_basis]
    return span_rank(a) == span_rank(a + [flatten(v) for v in vectors])


@dataclass
class BracketReport:
    contains_sp4: bool
    bracket_span_dim: int
    total_span_dim: int
    self_brackets_vanish: bool


def verify_bracket_generation(u1: list[Matrix], sp4: list[Matrix] | None = None) -> BracketReport:
    """Check [U1, U1] contains sp(4) and U1 + [U1, U1] spans all of sl(4)."""
    if len(u1) != 5:
        raise ValueError(f"U1 must be 5-dimensional, got {len(u1)} vectors")
    sp4 = sp4_from_B() if sp4 is None else sp4
    brackets = [bracket(a, b) for a, b in combinations(u1, 2)]
    selfs = all(all(x == 0 for x in flatten(bracket(a, a))) for a in u1)
    flat = [flatten(b) for b in brackets]
    return BracketReport(
        contains_sp4=contains(brackets, sp4),
        bracket_span_dim=span_rank(flat),
        total_span_dim=span_rank(flat + [flatten(u) for u in u1]),
        self_brackets_vanish=selfs,
    )


def lemma13_report(t: Sl2Triple | None = None) -> dict:
    """Run the whole verification and return a JSON-ready summary."""
    t = sl2_triple_sym3() if t is None else t
    bad = t.check()
    out: dict = {"triple_relations": "ok" if not bad else "violated: " + ", ".join(bad)}
    if bad:
        out["passed"] = False
        return out
    iso = isotypic_decomposition(t)
    sp4 = sp4_from_B()
    two, four, six = (iso.components.get(w, [[]])[0] for w in (2, 4, 6))
    flat = lambda xs: [flatten(x) for x in xs]  # noqa: E731
    sp4_eq = same_span(flat(sp4), flat(two + six))
    sp4_meets_u1 = span_rank(flat(sp4) + flat(four)) - len(sp4) - len(four)
    br = verify_bracket_generation(four, sp4)
    mult_ok = iso.multiplicities == {2: 1, 4: 1, 6: 1}
    out.update(
        {
            "multiplicities": {f"{w}L": c for w, c in sorted(iso.multiplicities.items())},
            "dims": iso.dims,
            "dim_sl4": sum(iso.dims),
            "decomposition": f"{sum(iso.dims)} = " + " + ".join(str(k) for k in iso.dims),
            "dim_sp4": len(sp4),
            "triple_in_sp4": contains(sp4, [t.E, t.H, t.F]),
            "sp4_equals_2L_plus_6L": sp4_eq,
            "sp4_meets_4L_trivially": sp4_meets_u1 == 0,
            "bracket_U1_contains_sp4": br.contains_sp4,
            "dim_bracket_U1": br.bracket_span_dim,
            "dim_U1_plus_bracket": br.total_span_dim,
            "ad_h_spectrum": ad_h_eigenvalues(t),
        }
    )
    out["passed"] = bool(
        mult_ok
        and sum(iso.dims) == 15
        and len(sp4) == 10
        and sp4_eq
        and br.contains_sp4
        and br.total_span_dim == 15
    )
    return out

