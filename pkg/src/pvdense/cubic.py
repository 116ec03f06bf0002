"""Binary cubic forms: the discriminant, the invariant symplectic form, and
the sufficient-irrationality certificate for quartic forms Delta(g^{-1} x)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .actions import AltForm2, Poly, altform_pullback, poly_pullback
from .exact import Matrix, ProjectivePoint, Verdict, as_exact, exact_sign, projective_is_rational

#: Delta(x) = x1^2 x2^2 + 18 x0 x1 x2 x3 - 4 x0 x2^3 - 4 x1^3 x3 - 27 x0^2 x3^2
DELTA = Poly(
    4,
    4,
    {
        (0, 2, 2, 0): 1,
        (1, 1, 1, 1): 18,
        (1, 0, 3, 0): -4,
        (0, 3, 0, 1): -4,
        (2, 0, 0, 2): -27,
    },
)

#: B(x, y) = x0 y3 - x1 y2 / 3 + x2 y1 / 3 - x3 y0
B_FORM = AltForm2(
    Matrix(
        [
            [0, 0, 0, 1],
            [0, 0, Fraction(-1, 3), 0],
            [0, Fraction(1, 3), 0, 0],
            [-1, 0, 0, 0],
        ]
    )
)


def disc_cubic(x: Sequence):
    x0, x1, x2, x3 = (as_exact(c) for c in x)
    return (
        x1 * x1 * x2 * x2
        + 18 * x0 * x1 * x2 * x3
        - 4 * x0 * x2 * x2 * x2
        - 4 * x1 * x1 * x1 * x3
        - 27 * x0 * x0 * x3 * x3
    )


def bform_B(x: Sequence, y: Sequence):
    x0, x1, x2, x3 = (as_exact(c) for c in x)
    y0, y1, y2, y3 = (as_exact(c) for c in y)
    return x0 * y3 - Fraction(1, 3) * x1 * y2 + Fraction(1, 3) * x2 * y1 - x3 * y0


@dataclass(frozen=True)
class Theorem14Certificate:
    delta_verdict: Verdict
    b_verdict: Verdict

    @property
    def sufficiently_irrational(self) -> bool:
        return not self.delta_verdict.rational and not self.b_verdict.rational

    def as_dict(self) -> dict:
        return {
            "case": "CUBIC4",
            "delta": self.delta_verdict.as_dict(),
            "B": self.b_verdict.as_dict(),
            "sufficiently_irrational": self.sufficiently_irrational,
        }


def pulled_back_delta(g: Matrix) -> Poly:
    return poly_pullback(DELTA, g)


def certify_theorem14(g: Matrix) -> Theorem14Certificate:
    """Test g[Delta] and g[B] for rationality in P(Sym^4 V*) and P(wedge^2 V*)."""
    g = _exact_matrix(g, 4)
    delta_pt = ProjectivePoint(pulled_back_delta(g).vector())
    b_pt = ProjectivePoint(altform_pullback(B_FORM, g).upper())
    return Theorem14Certificate(projective_is_rational(delta_pt), projective_is_rational(b_pt))


def _exact_matrix(g, n: int) -> Matrix:
    if isinstance(g, np.ndarray):
        raise TypeError("float matrices cannot be certified; reconstruct them exactly first")
    g = g if isinstance(g, Matrix) else Matrix(g)
    if g.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix, got {g.shape}")
    return g


def witness_target(r) -> tuple[Matrix, tuple[int, ...], object]:
    """h = diag(-4/r, -r/4, 1, 1) with Delta(h^{-1}(1, 0, 1, 0)) = r."""
    r = as_exact(r)
    if r == 0:
        raise ValueError("r must be nonzero")
    h = Matrix.diag([-4 / r, -r / 4, 1, 1])
    x0 = (1, 0, 1, 0)
    value = disc_cubic(h.inv() @ x0)
    return h, x0, value


def cubic_value(g, x: Sequence[int]):
    """Delta(g^{-1} x); exact for an exact g, float for a numpy array."""
    if isinstance(g, np.ndarray):
        y = np.linalg.solve(np.asarray(g, dtype=float), np.asarray(x, dtype=float))
        x0, x1, x2, x3 = y
        return float(
            x1 * x1 * x2 * x2 + 18 * x0 * x1 * x2 * x3 - 4 * x0 * x2**3 - 4 * x1**3 * x3 - 27 * x0 * x0 * x3 * x3
        )
    g = g if isinstance(g, Matrix) else Matrix(g)
    return disc_cubic(g.inv() @ tuple(as_exact(v) for v in x))


def sign_normalize(g: Matrix) -> tuple[Matrix, bool]:
    """Flip the sign of det g with the integral g' = diag(-1, 1, 1, 1) if needed.

    Neither certificate nor the value set at primitive points changes under
    this step; the CLI reports whether it was applied.
    """
    if exact_sign(g.det()) < 0:
        return Matrix.diag([-1, 1, 1, 1]) @ g, True
    return g, False
