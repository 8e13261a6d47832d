"""PMI-matrix and embedding tests: closed forms, SVD, serialization."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complete_graph, make_h, random_er
from orbitadj.countmatrix import CountMatrix
from orbitadj.embeddings import (
    PmiMatrix,
    deepwalk_pmi,
    embed,
    embedding_text,
    gopmi,
    rwpmi,
)
from orbitadj.errors import InputError
from orbitadj.graph import Graph
from orbitadj.oracle import brute_force_all


def adjacency(g: Graph) -> CountMatrix:
    dense = np.zeros((g.n, g.n), dtype=np.int64)
    for u in range(g.n):
        dense[u, g.neighbors(u)] = 1
    return CountMatrix.from_dense(dense)


def dense_adjacency(g: Graph) -> np.ndarray:
    dense = np.zeros((g.n, g.n), dtype=np.float64)
    for u in range(g.n):
        dense[u, g.neighbors(u)] = 1.0
    return dense


# ---------------------------------------------------------------------------
# gopmi


def test_gopmi_adjacency_worked_example():
    g = make_h()  # a=0 b=1 c=2 d=3 e=4; degrees 1,3,2,2,2; vol 10
    pmi = gopmi(adjacency(g))
    assert pmi.present[0, 1]
    assert pmi.values[0, 1] == pytest.approx(math.log(10 / 3), abs=1e-12)
    assert not pmi.present[0, 0]  # no diagonal in the adjacency
    assert not pmi.present[0, 2]  # a-c is not an edge
    assert pmi.present.sum() == 10  # both directions of the five edges
    np.testing.assert_array_equal(pmi.values, pmi.values.T)


def test_gopmi_asymmetric_base():
    g = make_h()
    base = brute_force_all(g).count_matrix((1, 2, 1))
    pmi = gopmi(base)
    np.testing.assert_array_equal(pmi.present, base.to_dense() > 0)
    # two 3-node paths end at a with centre b; vol 12, row mass 2, column
    # mass 6 -> log(12 * 2 / (2 * 6)) = log 2
    assert pmi.values[0, 1] == pytest.approx(math.log(2.0), abs=1e-12)
    assert not pmi.present[1, 0]  # no path centres on the degree-1 node a
    dense = base.to_dense().astype(np.float64)
    rows, cols = dense.sum(axis=1), dense.sum(axis=0)
    i, j = np.nonzero(dense)
    expected = np.log(dense.sum() * dense[i, j] / (rows[i] * cols[j]))
    np.testing.assert_allclose(pmi.values[i, j], expected, rtol=0, atol=1e-12)


def test_gopmi_rejects_bad_input():
    g = make_h()
    with pytest.raises(InputError):
        gopmi(CountMatrix.zeros(4))
    with pytest.raises(InputError):
        gopmi(adjacency(g), b=0.0)
    with pytest.raises(InputError):
        gopmi(adjacency(g), b=-2.0)


# ---------------------------------------------------------------------------
# rwpmi


def test_rwpmi_power2_support_and_values():
    g = make_h()
    pmi = rwpmi(g, p=2)
    # walks b-c-d and b-e-d land on the non-adjacent pair (b, d)
    assert pmi.present[1, 3]
    # row masses of A^2 are A @ degrees: 5 for b, 4 for d; total mass 22
    assert pmi.values[1, 3] == pytest.approx(math.log(22 * 2 / (5 * 4)), abs=1e-12)
    # the diagonal of A^2 is the degree sequence, so it is in support
    assert pmi.present[0, 0]
    assert pmi.values[0, 0] == pytest.approx(math.log(22 / 9), abs=1e-12)
    # no length-2 walk joins a and d
    assert not pmi.present[0, 3]


def test_rwpmi_power3_reaches_distance3_pair():
    g = make_h()
    assert not rwpmi(g, p=2).present[0, 3]
    assert rwpmi(g, p=3).present[0, 3]


def test_rwpmi_rejects_bad_input():
    g = make_h()
    for p in (0, 4, -1):
        with pytest.raises(InputError):
            rwpmi(g, p=p)
    with pytest.raises(InputError):
        rwpmi(Graph(3, []), p=1)
    with pytest.raises(InputError):
        rwpmi(g, p=1, b=0.0)


# ---------------------------------------------------------------------------
# deepwalk_pmi


def test_deepwalk_triangle_window2():
    pmi = deepwalk_pmi(complete_graph(3), T=2)
    assert pmi.present.all()
    # transition matrix has 1/2 off the diagonal; its square has 1/2 on the
    # diagonal and 1/4 off it; averaged, scaled by vol=6 and divided by
    # degree 2: 3/4 on the diagonal and 9/8 off it
    for x in range(3):
        for y in range(3):
            want = math.log(0.75) if x == y else math.log(1.125)
            assert pmi.values[x, y] == pytest.approx(want, abs=1e-12)


def test_deepwalk_h_window3_full_support():
    pmi = deepwalk_pmi(make_h(), T=3)
    assert pmi.present.all()


def test_deepwalk_isolated_node_is_absent():
    g = Graph(4, [(0, 1), (1, 2), (0, 2)])
    pmi = deepwalk_pmi(g, T=2)
    assert not pmi.present[3, :].any()
    assert not pmi.present[:, 3].any()
    assert pmi.present[:3, :3].all()


def test_deepwalk_rejects_bad_input():
    g = make_h()
    with pytest.raises(InputError):
        deepwalk_pmi(g, T=0)
    with pytest.raises(InputError):
        deepwalk_pmi(Graph(2, []), T=1)
    with pytest.raises(InputError):
        deepwalk_pmi(g, T=2, b=-1.0)


# ---------------------------------------------------------------------------
# cross-construction invariants


@pytest.mark.parametrize(
    "g",
    [make_h(), complete_graph(3), random_er(20, 0.3, seed=7)],
    ids=["H", "K3", "er20"],
)
def test_identity_chain_window1(g):
    base = gopmi(adjacency(g))
    walk = rwpmi(g, p=1)
    deep = deepwalk_pmi(g, T=1)
    np.testing.assert_array_equal(base.present, walk.present)
    np.testing.assert_array_equal(base.present, deep.present)
    mask = base.present
    np.testing.assert_allclose(
        base.values[mask], walk.values[mask], rtol=0, atol=1e-12
    )
    np.testing.assert_allclose(
        base.values[mask], deep.values[mask], rtol=0, atol=1e-12
    )


def test_b_shift_is_exact_subtraction():
    g = make_h()
    plain = gopmi(adjacency(g))
    for b in (2.0, 0.5, math.e, 10.0):
        shifted = gopmi(adjacency(g), b=b)
        np.testing.assert_array_equal(shifted.present, plain.present)
        mask = plain.present
        np.testing.assert_array_equal(
            shifted.values[mask], plain.values[mask] - math.log(b)
        )
    walk = rwpmi(g, p=2)
    walk_sh = rwpmi(g, p=2, b=3.0)
    np.testing.assert_array_equal(
        walk_sh.values[walk.present], walk.values[walk.present] - math.log(3.0)
    )
    deep = deepwalk_pmi(g, T=3)
    deep_sh = deepwalk_pmi(g, T=3, b=3.0)
    np.testing.assert_array_equal(
        deep_sh.values[deep.present], deep.values[deep.present] - math.log(3.0)
    )


@settings(max_examples=25, deadline=None)
@given(b=st.floats(min_value=0.01, max_value=100.0, allow_nan=False))
def test_b_shift_property(b):
    g = complete_graph(4)
    plain = gopmi(adjacency(g))
    shifted = gopmi(adjacency(g), b=b)
    mask = plain.present
    np.testing.assert_array_equal(
        shifted.values[mask], plain.values[mask] - math.log(b)
    )


def test_symmetric_base_gives_symmetric_clipped():
    for seed in range(3):
        g = random_er(15, 0.3, seed=seed)
        if g.m == 0:
            continue
        clipped = gopmi(adjacency(g)).clipped()
        np.testing.assert_array_equal(clipped, clipped.T)
        clipped = rwpmi(g, p=2).clipped()
        np.testing.assert_array_equal(clipped, clipped.T)


def test_clipped_semantics():
    values = np.array([[-1.0, 0.5], [0.2, 9.0]])
    present = np.array([[True, False], [True, True]])
    clipped = PmiMatrix(values, present, "test").clipped()
    np.testing.assert_array_equal(clipped, [[0.0, 0.0], [0.2, 9.0]])


# ---------------------------------------------------------------------------
# embed


def test_embed_matches_dense_svd():
    g = random_er(16, 0.4, seed=3)
    pmi = gopmi(adjacency(g))
    clipped = pmi.clipped()
    full_s = np.linalg.svd(clipped, compute_uv=False)
    for d in (1, 3, 5):
        emb = embed(pmi, d)
        assert emb.dim == d
        np.testing.assert_allclose(
            emb.singular_values, full_s[:d], rtol=0, atol=1e-8
        )
        assert np.all(np.diff(emb.singular_values) <= 1e-12)
        got = np.linalg.norm(clipped - emb.reconstruction())
        want = math.sqrt(float((full_s[d:] ** 2).sum()))
        assert got == pytest.approx(want, abs=1e-8)


def test_embed_reconstruction_error_non_increasing():
    for seed in range(5):
        g = random_er(14, 0.35, seed=seed)
        pmi = gopmi(adjacency(g))
        clipped = pmi.clipped()
        errors = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for d in range(1, 9):
                emb = embed(pmi, d)
                errors.append(np.linalg.norm(clipped - emb.reconstruction()))
        assert all(b <= a + 1e-9 for a, b in zip(errors, errors[1:])), errors


def test_embed_vectors_carry_sqrt_singular_values():
    pmi = gopmi(adjacency(make_h()))
    emb = embed(pmi, 2)
    norms = np.linalg.norm(emb.vectors, axis=0)
    np.testing.assert_allclose(
        norms, np.sqrt(emb.singular_values), rtol=0, atol=1e-10
    )


def test_embed_rank_deficient_warns_and_truncates():
    pmi = PmiMatrix(np.ones((4, 4)), np.ones((4, 4), dtype=bool), "test")
    with pytest.warns(UserWarning, match="rank 1"):
        emb = embed(pmi, 3)
    assert emb.dim == 1
    assert emb.singular_values[0] == pytest.approx(4.0, abs=1e-10)
    np.testing.assert_allclose(
        emb.reconstruction(), np.ones((4, 4)), rtol=0, atol=1e-10
    )


def test_embed_fully_clipped_matrix():
    pmi = PmiMatrix(-np.ones((3, 3)), np.ones((3, 3), dtype=bool), "test")
    with pytest.warns(UserWarning):
        emb = embed(pmi, 2)
    assert emb.dim == 0
    assert emb.vectors.shape == (3, 0)
    np.testing.assert_array_equal(emb.reconstruction(), np.zeros((3, 3)))


def test_embed_is_deterministic():
    pmi = rwpmi(random_er(18, 0.3, seed=11), p=2)
    first = embed(pmi, 4)
    second = embed(pmi, 4)
    np.testing.assert_array_equal(first.vectors, second.vectors)
    np.testing.assert_array_equal(first.singular_values, second.singular_values)


def test_embed_rejects_bad_dimension():
    pmi = gopmi(adjacency(make_h()))
    with pytest.raises(InputError):
        embed(pmi, 0)


# ---------------------------------------------------------------------------
# serialization


def test_embedding_text_round_trips_floats():
    g = make_h()
    emb = embed(gopmi(adjacency(g)), 2)
    text = embedding_text(g, emb)
    lines = text.splitlines()
    assert len(lines) == 5
    assert text.endswith("\n")
    for x, line in enumerate(lines):
        fields = line.split("\t")
        assert fields[0] == g.labels[x]
        assert len(fields) == 3
        for k, field in enumerate(fields[1:]):
            assert float(field) == emb.vectors[x, k]


def test_embedding_text_rejects_size_mismatch():
    emb = embed(gopmi(adjacency(complete_graph(3))), 2)
    with pytest.raises(InputError):
        embedding_text(make_h(), emb)
