from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from pvdense.actions import (
    AltForm2,
    BinaryForm,
    Poly,
    adjoint_action,
    altform_pullback,
    is_primitive,
    monomials,
    poly_pullback,
    primitive_points,
    primitive_shard,
    sym_power_action,
    sym_power_differential,
)
from pvdense.cubic import B_FORM, DELTA
from pvdense.exact import Matrix, SingularMatrixError, sqrt_of

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


nonzero = small.filter(lambda t: t != 0)


@st.composite
def gl2(draw):
    """Invertible by construction: diagonal times two elementary matrices."""
    d = Matrix.diag([draw(nonzero), draw(nonzero)])
    return d @ Matrix([[1, draw(small)], [0, 1]]) @ Matrix([[1, 0], [draw(small), 1]])


@st.composite
def sl2(draw):
    """Products of rational elementary and diagonal matrices."""
    a = draw(nonzero)
    b, c = draw(small), draw(small)
    return Matrix([[1, b], [0, 1]]) @ Matrix([[1, 0], [c, 1]]) @ Matrix.diag([a, 1 / a])


def _sympy_substitution(s: Matrix, deg: int) -> Matrix:
    """Oracle: coefficients of f(s^-1 (v1, v2)) for each basis monomial f."""
    v1, v2 = sympy.symbols("v1 v2")
    si = sympy.Matrix([[sympy.Rational(str(x)) for x in row] for row in s.rows]).inv()
    w1 = si[0, 0] * v1 + si[0, 1] * v2
    w2 = si[1, 0] * v1 + si[1, 1] * v2
    cols = []
    for i in range(deg + 1):
        p = sympy.Poly(sympy.expand(w1 ** (deg - i) * w2**i), v1, v2)
        cols.append([Fraction(str(p.coeff_monomial(v1 ** (deg - j) * v2**j))) for j in range(deg + 1)])
    return Matrix.from_columns(cols)


# symmetric powers


def test_sym3_identity():
    assert sym_power_action(Matrix.identity(2), 3) == Matrix.identity(4)


def test_sym3_torus():
    a = Fraction(3, 2)
    assert sym_power_action(Matrix.diag([a, 1 / a]), 3) == Matrix.diag([a**-3, 1 / a, a, a**3])


def test_sym3_rotation_has_order_four():
    r = sym_power_action(Matrix([[0, -1], [1, 0]]), 3)
    assert r != Matrix.identity(4)
    assert r**4 == Matrix.identity(4)


@settings(max_examples=20, deadline=None)
@given(gl2(), st.integers(1, 4))
def test_sym_power_matches_sympy(s, deg):
    assert sym_power_action(s, deg) == _sympy_substitution(s, deg)


@settings(max_examples=30, deadline=None)
@given(gl2(), gl2())
def test_sym_power_is_homomorphism(s1, s2):
    assert sym_power_action(s1 @ s2, 3) == sym_power_action(s1, 3) @ sym_power_action(s2, 3)


@settings(max_examples=30, deadline=None)
@given(gl2())
def test_sym3_determinant(s):
    assert sym_power_action(s, 3).det() == s.det() ** -6


def test_sym3_determinant_on_sl2_is_one():
    s = Matrix([[2, 3], [1, 2]])
    assert sym_power_action(s, 3).det() == 1


def test_singular_s_is_rejected():
    with pytest.raises(SingularMatrixError):
        sym_power_action(Matrix([[1, 2], [2, 4]]), 3)


def test_binary_form_act_matches_matrix():
    f = BinaryForm((1, 0, 0, 0))
    s = Matrix([[1, 1], [0, 1]])
    # v1^3 under v1 -> v1 - v2
    assert f.act(s).coeffs == (1, -3, 3, -1)


def test_differential_is_derivative():
    x = Matrix([[1, 2], [3, -1]])
    t = Fraction(1, 10**6)
    exp_approx = Matrix.identity(2) + x.scale(t)
    diff = (sym_power_action(exp_approx, 3) - Matrix.identity(4)).scale(1 / t)
    err = diff - sym_power_differential(x, 3)
    assert max(abs(float(v)) for v in err.entries()) < 1e-4


# polynomials


def test_monomial_count():
    assert len(monomials(4, 4)) == 35
    assert monomials(2, 2) == ((2, 0), (1, 1), (0, 2))


def test_pullback_identity():
    assert poly_pullback(DELTA, Matrix.identity(4)) == DELTA


def test_pullback_scaling():
    p = Poly(4, 2, {(2, 0, 0, 0): 1})
    assert poly_pullback(p, Matrix.diag([2, 1, 1, 1])) == Poly(4, 2, {(2, 0, 0, 0): Fraction(1, 4)})


@settings(max_examples=15, deadline=None)
@given(sl2())
def test_delta_invariant_under_sl2(s):
    assert poly_pullback(DELTA, sym_power_action(s, 3)) == DELTA


@settings(max_examples=10, deadline=None)
@given(gl2(), gl2())
def test_pullback_composes(s1, s2):
    g, h = sym_power_action(s1, 3), sym_power_action(s2, 3)
    # f -> f o g^{-1} is a left action: h.(g.P) = (hg).P
    assert poly_pullback(poly_pullback(DELTA, g), h) == poly_pullback(DELTA, h @ g)


def test_pullback_evaluates_at_inverse():
    g = Matrix([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 2, 0], [0, 0, 1, 1]])
    x = (1, -2, 3, 5)
    assert poly_pullback(DELTA, g)(x) == DELTA(g.inv() @ x)


def test_pullback_over_quadratic_field():
    s2 = sqrt_of(2)
    p = Poly(2, 2, {(1, 1): 1})
    q = poly_pullback(p, Matrix.diag([1 + s2, 1]))
    assert q.coeffs == {(1, 1): -1 + s2}


def test_poly_text():
    assert DELTA.to_text() == "-27*x0^2*x3^2 + 18*x0*x1*x2*x3 - 4*x0*x2^3 - 4*x1^3*x3 + x1^2*x2^2"


# alternating forms


def test_altform_identity():
    assert altform_pullback(B_FORM, Matrix.identity(4)) == B_FORM


def test_altform_scaling_halves_entry():
    m = altform_pullback(B_FORM, Matrix.diag([1, 1, 1, 2])).matrix
    assert m[0, 3] == Fraction(1, 2) * B_FORM.matrix[0, 3]
    assert m[1, 2] == B_FORM.matrix[1, 2]


@settings(max_examples=20, deadline=None)
@given(sl2())
def test_b_invariant_under_sl2(s):
    assert altform_pullback(B_FORM, sym_power_action(s, 3)) == B_FORM


def test_altform_requires_antisymmetry():
    with pytest.raises(ValueError):
        AltForm2(Matrix([[0, 1], [2, 0]]))


# adjoint action


def test_adjoint_identity():
    x = Matrix([[1, 2, 0], [0, -1, 3], [4, 0, 0]])
    assert adjoint_action(Matrix.identity(3), x) == x


def test_adjoint_cycle_permutes_diagonal():
    p = Matrix([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    assert adjoint_action(p, Matrix.diag([1, -1, 0])) == Matrix.diag([0, 1, -1])


@settings(max_examples=20, deadline=None)
@given(st.lists(small, min_size=9, max_size=9), st.lists(small, min_size=8, max_size=8))
def test_adjoint_preserves_invariants(gv, xv):
    g = Matrix([gv[0:3], gv[3:6], gv[6:9]])
    if g.det() == 0:
        return
    x = Matrix([[xv[0], xv[1], xv[2]], [xv[3], xv[4], xv[5]], [xv[6], xv[7], -xv[0] - xv[4]]])
    y = adjoint_action(g, x)
    assert y.trace() == 0
    assert y.det() == x.det()
    assert (y @ y).trace() == (x @ x).trace()


def test_adjoint_rejects_trace():
    with pytest.raises(ValueError):
        adjoint_action(Matrix.identity(3), Matrix.identity(3))


# primitive points


def test_primitive_points_small():
    assert list(primitive_points(1, 2)) == [(-1,), (1,)]
    assert len(list(primitive_points(2, 1))) == 8


def test_primitive_count_n2_r5():
    brute = sum(
        1 for x in itertools.product(range(-5, 6), repeat=2) if x != (0, 0) and math.gcd(*x) == 1
    )
    assert brute == 80
    assert len(list(primitive_points(2, 5))) == brute


@pytest.mark.parametrize("n, r", [(1, 8), (2, 8), (3, 5), (3, 8)])
def test_primitive_points_exhaustive(n, r):
    pts = list(primitive_points(n, r))
    assert len(pts) == len(set(pts))
    expected = {x for x in itertools.product(range(-r, r + 1), repeat=n) if math.gcd(*x) == 1}
    assert set(pts) == expected
    assert pts == sorted(pts)


@pytest.mark.parametrize("n, r", [(1, 3), (2, 4), (3, 3), (4, 2)])
def test_shards_concatenate_to_stream(n, r):
    shards = np.concatenate([primitive_shard(n, r, lead) for lead in range(-r, r + 1)])
    assert [tuple(int(v) for v in p) for p in shards] == list(primitive_points(n, r))


def test_is_primitive():
    assert is_primitive((2, 3))
    assert not is_primitive((2, 4))
    assert not is_primitive((0, 0))
