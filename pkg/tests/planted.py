"""Planted instances for the trivector basis search."""
from __future__ import annotations

import numpy as np

from pvdense.exact import Matrix
from pvdense.trivector import GENERATORS, SEARCH_TRIPLES, TRIPLE_INDEX, Trivector, transform_coordinates

STEPS = 5


def planted_instance(seed: int) -> tuple[Trivector, list[float], Matrix]:
    """A small integer trivector x, a unimodular U0 made of STEPS generator
    moves, and the targets y read off U0 . x."""
    rng = np.random.default_rng(seed)
    x = Trivector([int(v) for v in rng.integers(-3, 4, 20)])
    u = np.eye(6, dtype=np.int64)
    for _ in range(STEPS):
        i, j, s = GENERATORS[rng.integers(len(GENERATORS))]
        u[i] += s * u[j]
    u0 = Matrix(u.tolist())
    coords = transform_coordinates(x, u0)
    y = [float(coords[TRIPLE_INDEX[t]]) for t in SEARCH_TRIPLES]
    return x, y, u0
