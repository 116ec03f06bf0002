from __future__ import annotations

import time
from collections import Counter

import pytest

from pvdense.exact import Matrix, same_span, span_rank
from pvdense.lie import (
    Sl2Triple,
    TripleRelationError,
    ad_h_eigenvalues,
    ad_matrix,
    bracket,
    contains,
    flatten,
    isotypic_decomposition,
    lemma13_report,
    sl2_triple_sym3,
    sp4_from_B,
    verify_bracket_generation,
)


@pytest.fixture(scope="module")
def triple():
    return sl2_triple_sym3()


@pytest.fixture(scope="module")
def iso(triple):
    return isotypic_decomposition(triple)


def test_triple_relations(triple):
    assert triple.check() == []
    assert bracket(triple.E, triple.F) - triple.H == Matrix.zeros(4, 4)
    assert triple.E.trace() == triple.F.trace() == triple.H.trace() == 0


def test_h_is_diagonal_with_odd_weights(triple):
    diag = [triple.H[i, i] for i in range(4)]
    assert sorted(diag) == [-3, -1, 1, 3]
    assert all(triple.H[i, j] == 0 for i in range(4) for j in range(4) if i != j)


def test_multiplicities_and_dims(iso):
    assert iso.multiplicities == {2: 1, 4: 1, 6: 1}
    assert iso.dims == [3, 5, 7]
    assert sum(iso.dims) == 15


def test_two_lambda_is_the_triple(triple, iso):
    assert same_span([flatten(x) for x in iso.component(2)], [flatten(x) for x in (triple.E, triple.H, triple.F)])


def test_components_are_weight_vectors(triple, iso):
    ad_h, ad_e = ad_matrix(triple.H), ad_matrix(triple.E)
    for top, comps in iso.components.items():
        for chain in comps:
            for k, v in enumerate(chain):
                m = top - 2 * k
                assert ad_h @ flatten(v) == tuple(m * c for c in flatten(v))
            lowest = flatten(chain[-1])
            for _ in range(top + 1):
                lowest = ad_e @ lowest
            assert all(c == 0 for c in lowest)


def test_components_are_independent(iso):
    vecs = [flatten(v) for comps in iso.components.values() for chain in comps for v in chain]
    assert span_rank(vecs) == 15


def test_ad_h_spectrum(triple):
    diffs = Counter(a - b for a in (3, 1, -1, -3) for b in (3, 1, -1, -3))
    diffs[0] -= 1
    assert Counter(ad_h_eigenvalues(triple)) == diffs


def test_sp4(triple, iso):
    sp4 = sp4_from_B()
    assert len(sp4) == 10
    assert contains(sp4, [triple.E, triple.H, triple.F])
    flat = [flatten(x) for x in sp4]
    assert same_span(flat, [flatten(x) for x in iso.component(2) + iso.component(6)])
    u1 = [flatten(x) for x in iso.component(4)]
    assert span_rank(flat + u1) == 15


def test_bracket_generation(iso):
    report = verify_bracket_generation(iso.component(4))
    assert report.contains_sp4
    assert report.total_span_dim == 15
    assert report.self_brackets_vanish


def test_bracket_generation_wrong_dimension(iso):
    with pytest.raises(ValueError):
        verify_bracket_generation(iso.component(4)[:4])


def test_broken_triple_rejected(triple):
    bad = Sl2Triple(triple.E.scale(2), triple.H, triple.F)
    assert bad.check() == ["[E,F] = H"]
    with pytest.raises(TripleRelationError):
        isotypic_decomposition(bad)


def test_full_report_is_fast():
    start = time.perf_counter()
    report = lemma13_report()
    elapsed = time.perf_counter() - start
    assert report["passed"]
    assert report["decomposition"] == "15 = 3 + 5 + 7"
    assert report["dim_sp4"] == 10
    assert elapsed < 1.0
