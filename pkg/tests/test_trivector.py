from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from pvdense.exact import Matrix, ProjectivePoint, parts, projective_is_rational, rank, same_span, sqrt_of
from pvdense.search import Annealing
from pvdense.trivector import (
    SEARCH_TRIPLES,
    TRIPLE_INDEX,
    TRIPLES,
    NotSemistableError,
    Trivector,
    act,
    basis_search,
    certify_theorem11,
    decompose_trivector,
    eval_trivector,
    is_decomposable,
    k_operator,
    pair_point,
    plucker,
    plucker_relations,
    quartic_lambda,
    wedge_square,
)

from .planted import planted_instance

S2 = sqrt_of(2)
W = Trivector.standard()
E123 = Trivector.from_terms({(0, 1, 2): 1})
# real part of (e1 + i e2) ^ (e3 + i e4) ^ (e5 + i e6)
COMPLEX = Trivector.from_terms({(0, 2, 4): 1, (0, 3, 5): -1, (1, 2, 5): -1, (1, 3, 4): -1})


def unit(i: int) -> tuple:
    return tuple(Fraction(int(i == j)) for j in range(6))


def random_gl6(rng: random.Random) -> Matrix:
    while True:
        g = Matrix([[Fraction(rng.randint(-3, 3), rng.choice([1, 2])) for _ in range(6)] for _ in range(6)])
        if g.det() != 0:
            return g


def random_trivector(rng: random.Random) -> Trivector:
    return Trivector([rng.randint(-3, 3) for _ in range(20)])


# K and lambda


def test_k_of_w():
    assert k_operator(W) == Matrix.diag([1, 1, 1, -1, -1, -1])


def test_k_of_decomposable_is_nilpotent():
    k = k_operator(E123)
    assert k @ k == Matrix.zeros(6, 6)


def test_k_square_is_scalar_and_traceless():
    rng = random.Random(1)
    for _ in range(5):
        x = random_trivector(rng)
        k = k_operator(x)
        assert k.trace() == 0
        assert k @ k == Matrix.identity(6).scale(quartic_lambda(x))


def test_k_is_quadratic():
    x = random_trivector(random.Random(2))
    t = Fraction(-5, 3)
    assert k_operator(x.scale(t)) == k_operator(x).scale(t * t)


def test_lambda_examples():
    assert quartic_lambda(W) == 1
    assert quartic_lambda(E123) == 0
    x = random_trivector(random.Random(3))
    assert quartic_lambda(x.scale(3)) == 81 * quartic_lambda(x)


def test_k_equivariance_factor():
    rng = random.Random(4)
    x = random_trivector(rng)
    for _ in range(3):
        g = random_gl6(rng)
        lhs = k_operator(act(g, x))
        rhs = g @ k_operator(x) @ g.inv()
        assert lhs == rhs.scale(g.det())
    # pinned by a diagonal element
    g = Matrix.diag([2, 1, 1, 1, 1, 1])
    assert k_operator(act(g, W)) == (g @ k_operator(W) @ g.inv()).scale(2)


def test_lambda_relative_invariance():
    rng = random.Random(5)
    for _ in range(4):
        x, g = random_trivector(rng), random_gl6(rng)
        assert quartic_lambda(act(g, x)) == g.det() ** 2 * quartic_lambda(x)


# decomposition


def test_decompose_w():
    dec = decompose_trivector(W)
    assert dec.reality == "REAL_SPLIT"
    assert same_span(dec.e1, [unit(0), unit(1), unit(2)])
    assert same_span(dec.e2, [unit(3), unit(4), unit(5)])
    assert dec.omega1 == E123
    assert dec.omega2 == Trivector.from_terms({(3, 4, 5): 1})


@pytest.mark.parametrize("seed", range(4))
def test_decompose_round_trip(seed):
    rng = random.Random(seed)
    g = random_gl6(rng)
    x = act(g, W)
    dec = decompose_trivector(x)
    assert dec.omega1 + dec.omega2 == x
    assert wedge_square(dec.omega1) == {} and wedge_square(dec.omega2) == {}
    assert is_decomposable(dec.omega1) and is_decomposable(dec.omega2)
    assert rank([list(v) for v in dec.e1 + dec.e2]) == 6
    cols = [tuple(g[i, j] for i in range(6)) for j in range(6)]
    first, second = cols[:3], cols[3:]
    assert (same_span(dec.e1, first) and same_span(dec.e2, second)) or (
        same_span(dec.e1, second) and same_span(dec.e2, first)
    )


def test_complex_pair():
    assert quartic_lambda(COMPLEX) == -4
    dec = decompose_trivector(COMPLEX)
    assert dec.reality == "COMPLEX_PAIR"
    assert len(dec.planes) == 3
    for v, kv in dec.planes:
        assert dec.k @ kv == tuple(dec.lam * c for c in v)
    assert certify_theorem11(COMPLEX).reality == "COMPLEX_PAIR"
    assert not certify_theorem11(COMPLEX).sufficiently_irrational


def test_decompose_rejects_unstable():
    with pytest.raises(NotSemistableError):
        decompose_trivector(E123)


# Plücker and pair points


def test_plucker_coordinate_plane():
    p = plucker([unit(0), unit(1), unit(2)])
    assert p == ProjectivePoint([1] + [0] * 19)


def test_plucker_basis_change():
    rng = random.Random(6)
    basis = [tuple(rng.randint(-3, 3) for _ in range(6)) for _ in range(3)]
    m = Matrix([[2, 1, 0], [1, 1, 0], [3, -1, 5]])
    changed = [tuple(sum(m[i, k] * basis[k][j] for k in range(3)) for j in range(6)) for i in range(3)]
    assert plucker(basis) == plucker(changed)


def test_plucker_irrational_plane():
    v = tuple(Fraction(int(j == 0)) + (S2 if j == 3 else 0) for j in range(6))
    p = plucker([v, unit(1), unit(2)])
    c = p.coeffs
    assert c[TRIPLE_INDEX[(0, 1, 2)]] == 1
    assert c[TRIPLE_INDEX[(1, 2, 3)]] in (S2, -S2)
    assert sum(1 for x in c if x != 0) == 2
    assert not projective_is_rational(c).rational
    assert plucker_relations(p)


def test_plucker_wrong_dimension():
    with pytest.raises(ValueError):
        plucker([unit(0), unit(1)])
    with pytest.raises(ValueError):
        plucker([unit(0), unit(1), unit(1)])


def test_pair_point_symmetric_and_scale_free():
    p1 = plucker([unit(0), unit(1), (1, 0, 0, 2, 1, 0)])
    p2 = plucker([unit(3), unit(4), (0, 1, S2, 0, 0, 1)])
    assert pair_point(p1, p2) == pair_point(p2, p1)
    assert pair_point(ProjectivePoint([3 * c for c in p1.coeffs]), p2) == pair_point(p1, p2)
    assert projective_is_rational(pair_point(p1, p1).coeffs).rational


def test_conjugate_pair_is_rational():
    v1 = (1, 0, 0, S2, 0, 0)
    v2 = (1, 0, 0, -S2, 0, 0)
    p1, p2 = plucker([v1, unit(1), unit(2)]), plucker([v2, unit(1), unit(2)])
    assert not projective_is_rational(p1.coeffs).rational
    assert not projective_is_rational(p2.coeffs).rational
    assert projective_is_rational(pair_point(p1, p2).coeffs).rational


# certificate


def _mixed_g() -> Matrix:
    rows = [list(r) for r in Matrix.identity(6).rows]
    rows[3][0] = S2
    rows[1][4] = 1 + S2
    rows[5][2] = S2
    return Matrix(rows)


def _oracle_plane_rational(cols) -> bool:
    """Independent check: 3x3 minors via sympy, then rationality of all ratios."""
    m = sympy.Matrix([[sympy.Rational(str(parts(c)[0])) + sympy.Rational(str(parts(c)[1])) * sympy.sqrt(2)
                       for c in col] for col in cols])
    minors = [sympy.expand(m[:, list(t)].det()) for t in TRIPLES]
    ref = next(x for x in minors if x != 0)
    return all(sympy.nsimplify(sympy.radsimp(x / ref)).is_rational for x in minors)


def test_certify_w_not_sufficient():
    cert = certify_theorem11(W)
    assert cert.reality == "REAL_SPLIT"
    assert cert.verdict_e1.rational and cert.verdict_e2.rational and cert.verdict_pair.rational
    assert not cert.sufficiently_irrational


def test_certify_mixed_g_against_oracle():
    g = _mixed_g()
    cert = certify_theorem11(act(g, W))
    cols = [tuple(g[i, j] for i in range(6)) for j in range(6)]
    oracle = {_oracle_plane_rational(cols[:3]), _oracle_plane_rational(cols[3:])}
    assert oracle == {False}
    assert not cert.verdict_e1.rational and not cert.verdict_e2.rational
    assert not cert.verdict_pair.rational
    assert cert.sufficiently_irrational


def test_certify_diagonal_g_has_rational_plane():
    cert = certify_theorem11(act(Matrix.diag([1, 1, 1, 1, 1, 1 + S2]), W))
    assert cert.verdict_e1.rational and cert.verdict_e2.rational
    assert not cert.sufficiently_irrational


def test_rational_x_with_rational_root_not_sufficient():
    rng = random.Random(7)
    for _ in range(3):
        cert = certify_theorem11(act(random_gl6(rng), W))
        assert not cert.sufficiently_irrational


def test_certify_rejects_float_and_unstable():
    with pytest.raises(TypeError):
        certify_theorem11(np.zeros(20))
    with pytest.raises(NotSemistableError):
        certify_theorem11(E123)


def test_trivector_text_round_trip():
    x = act(_mixed_g(), W)
    assert Trivector.parse(x.to_text(), d=2) == x


# evaluation


def test_eval_examples():
    assert eval_trivector(W, unit(0), unit(1), unit(2)) == 1
    rng = random.Random(8)
    x = random_trivector(rng)
    u, v, t = ([rng.randint(-4, 4) for _ in range(6)] for _ in range(3))
    assert eval_trivector(x, u, u, t) == 0
    assert eval_trivector(x, v, u, t) == -eval_trivector(x, u, v, t)
    u2 = [rng.randint(-4, 4) for _ in range(6)]
    combo = [2 * a - 3 * b for a, b in zip(u, u2)]
    assert eval_trivector(x, combo, v, t) == 2 * eval_trivector(x, u, v, t) - 3 * eval_trivector(x, u2, v, t)


# basis search


def _own_targets(x: Trivector) -> list[float]:
    return [float(x[t]) for t in SEARCH_TRIPLES]


def test_search_identity_targets():
    x = random_trivector(random.Random(9))
    rep = basis_search(x, _own_targets(x), eps=1e-9, budget=50, seed=0)
    assert rep.error == 0
    assert rep.best_point == tuple(tuple(int(i == j) for j in range(6)) for i in range(6))
    assert rep.params["success"]


def test_search_planted():
    x, y, _ = planted_instance(0)
    rep = basis_search(x, y, eps=1e-6, budget=100_000, seed=0)
    assert rep.error == 0
    assert rep.params["det"] in (1, -1)
    basis = Matrix([list(r) for r in rep.best_point])
    assert [float(eval_trivector(x, basis.rows[i], basis.rows[j], basis.rows[k])) for i, j, k in SEARCH_TRIPLES] == y


def test_search_generic_trace_and_determinant():
    x = random_trivector(random.Random(10))
    y = list(np.random.default_rng(1).normal(0, 3, 10))
    rep = basis_search(x, y, eps=1e-3, budget=3000, seed=4)
    errs = [e for _, e in rep.trace]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert [i for i, _ in rep.trace] == sorted(i for i, _ in rep.trace)
    assert rep.error == pytest.approx(errs[-1])
    assert abs(Matrix([list(r) for r in rep.best_point]).det()) == 1
    assert rep.evaluations <= 3000


def test_search_is_reproducible():
    x = random_trivector(random.Random(11))
    y = [0.5] * 10
    a = basis_search(x, y, eps=1e-3, budget=2000, seed=3)
    b = basis_search(x, y, eps=1e-3, budget=2000, seed=3)
    assert a.to_json() == b.to_json()
    sched = Annealing(t0=0.2, cooling=0.9, t_min=1e-5)
    c = basis_search(x, y, eps=1e-3, budget=2000, seed=3, schedule=sched)
    assert c.params["t0"] == 0.2


def test_search_accepts_float_trivector():
    x = random_trivector(random.Random(12))
    xf = np.array([float(c) + 0.25 for c in x.coeffs])
    rep = basis_search(xf, [float(c) + 0.25 for c in _own_targets(x)], eps=1e-9, budget=20)
    assert rep.error == 0


def test_search_rejects_bad_arguments():
    with pytest.raises(ValueError):
        basis_search(W, [0.0] * 10, eps=0, budget=10)
    with pytest.raises(ValueError):
        basis_search(W, [0.0] * 9, eps=0.1, budget=10)
