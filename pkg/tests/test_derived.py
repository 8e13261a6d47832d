"""Derived-count tests: orbit vectors, graphlet adjacency, walk residuals."""

import numpy as np
import pytest
from scipy.sparse.csgraph import shortest_path

from conftest import make_h, random_er, zoo
from orbitadj.countmatrix import CountMatrix
from orbitadj.derived import (
    KEYS_OF_GRAPHLET,
    gdv,
    gdv_text,
    graphlet_adjacency,
    rw_decompose,
)
from orbitadj.errors import InconsistencyError, InputError
from orbitadj.graphlets import MULTIPLICITY, ORDERED_KEYS, RW3_SEEN
from orbitadj.oracle import brute_force_all
from orbitadj.solver import compute_all


def test_keys_partition_by_graphlet():
    pooled = [k for keys in KEYS_OF_GRAPHLET.values() for k in keys]
    assert sorted(pooled) == sorted(ORDERED_KEYS)
    for graphlet, keys in KEYS_OF_GRAPHLET.items():
        assert keys, graphlet
    assert KEYS_OF_GRAPHLET[0] == ((0, 0, 1),)
    assert set(KEYS_OF_GRAPHLET[1]) == {(1, 2, 1), (2, 1, 1), (1, 1, 2)}
    assert set(KEYS_OF_GRAPHLET[8]) == {(14, 14, 1)}


@pytest.mark.parametrize("name", sorted(zoo()))
def test_gdv_matches_oracle_census(name, graph_zoo):
    g = graph_zoo[name]
    result, _ = compute_all(g)
    np.testing.assert_array_equal(gdv(result), brute_force_all(g).gdv)


def test_gdv_matches_oracle_census_random():
    for seed in range(3):
        g = random_er(26 + 9 * seed, 0.2, seed)
        result, _ = compute_all(g)
        np.testing.assert_array_equal(gdv(result), brute_force_all(g).gdv)


def test_gdv_worked_example():
    result, _ = compute_all(make_h())  # a=0 b=1 c=2 d=3 e=4
    vectors = gdv(result)
    np.testing.assert_array_equal(
        vectors[0], [1, 2, 0, 0, 2, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0]
    )
    assert vectors[0, 0] == 1  # node a has degree 1
    np.testing.assert_array_equal(vectors[:, 0], [1, 3, 2, 2, 2])  # degrees


def test_gdv_complete_graph(graph_zoo):
    result, _ = compute_all(graph_zoo["K4"])
    vectors = gdv(result)
    expected = np.zeros((4, 15), dtype=np.int64)
    expected[:, 0] = 3
    expected[:, 3] = 3
    expected[:, 14] = 1
    np.testing.assert_array_equal(vectors, expected)


def test_gdv_edgeless():
    from orbitadj.graph import Graph

    result, _ = compute_all(Graph(6, []))
    np.testing.assert_array_equal(gdv(result), np.zeros((6, 15), dtype=np.int64))


def test_gdv_row_sum_invariant():
    g = random_er(30, 0.25, 17)
    result, _ = compute_all(g)
    vectors = gdv(result)
    for key in ORDERED_KEYS:
        np.testing.assert_array_equal(
            result.matrix(key).row_sums(),
            MULTIPLICITY[key] * vectors[:, key[0]],
            err_msg=str(key),
        )


def test_gdv_detects_cross_route_mismatch():
    result, _ = compute_all(make_h())
    result.matrices[(1, 2, 1)] = CountMatrix.zeros(result.n)
    with pytest.raises(InconsistencyError):
        gdv(result)


def test_gdv_detects_indivisible_row_sum():
    result, _ = compute_all(make_h())
    result.matrices[(2, 1, 1)] = CountMatrix.from_coo(
        result.n, [0, 1], [1, 0], [1, 1]
    )
    with pytest.raises(InconsistencyError):
        gdv(result)


def test_gdv_text_format():
    g = make_h()
    result, _ = compute_all(g)
    text = gdv_text(g, gdv(result))
    lines = text.splitlines()
    assert len(lines) == 5
    assert lines[0].split("\t") == [
        "a", "1", "2", "0", "0", "2", "0", "1", "0", "0", "0", "0", "0", "0", "0", "0",
    ]
    with pytest.raises(InputError):
        gdv_text(g, np.zeros((3, 15), dtype=np.int64))


# ---------------------------------------------------------------------------
# graphlet adjacency


@pytest.mark.parametrize("name", sorted(zoo()))
def test_graphlet_adjacency_matches_oracle(name, graph_zoo):
    g = graph_zoo[name]
    result, _ = compute_all(g)
    oracle = brute_force_all(g)
    for graphlet in range(9):
        np.testing.assert_array_equal(
            graphlet_adjacency(result, graphlet).to_dense(),
            oracle.graphlet_adjacency[graphlet],
            err_msg=f"graphlet {graphlet} on {name}",
        )


def test_graphlet_adjacency_worked_example():
    result, _ = compute_all(make_h())  # a=0 b=1 c=2 d=3 e=4
    path3 = graphlet_adjacency(result, 1)
    assert path3.entry(0, 1) == 2  # a,b share paths a-b-c and a-b-e
    assert path3.entry(1, 2) == 3  # b,c share a-b-c, c-b-e, b-c-d
    assert path3.entry(0, 3) == 0  # a,d never co-occur in a 3-path
    adjacency = graphlet_adjacency(result, 0)
    np.testing.assert_array_equal(
        adjacency.to_dense(), result.matrix((0, 0, 1)).to_dense()
    )
    assert graphlet_adjacency(result, 2).nnz == 0  # triangle-free


def test_graphlet_adjacency_is_symmetric_zero_diagonal():
    g = random_er(24, 0.3, 2)
    result, _ = compute_all(g)
    for graphlet in range(9):
        m = graphlet_adjacency(result, graphlet).to_dense()
        np.testing.assert_array_equal(m, m.T)
        assert np.diagonal(m).sum() == 0


def test_graphlet_adjacency_support_is_distance_three_ball():
    for seed in (0, 1):
        g = random_er(22, 0.15, seed)
        result, _ = compute_all(g)
        total = CountMatrix.zeros(g.n)
        for graphlet in range(9):
            total = total.add(graphlet_adjacency(result, graphlet))
        dist = shortest_path(result.matrix((0, 0, 1)).to_csr(), unweighted=True)
        within = (dist >= 1) & (dist <= 3)
        np.testing.assert_array_equal(total.to_dense() != 0, within)


def test_graphlet_adjacency_rejects_bad_index():
    result, _ = compute_all(make_h())
    with pytest.raises(InputError):
        graphlet_adjacency(result, 9)


# ---------------------------------------------------------------------------
# random-walk decomposition


@pytest.mark.parametrize("length", [2, 3])
def test_rw_residual_zero_everywhere(length, graph_zoo):
    for name, g in graph_zoo.items():
        result, _ = compute_all(g)
        report = rw_decompose(g, result, length)
        assert report.residual_is_zero, name
        assert report.walk_count == sum(report.masses.values()), name
        if length == 2:
            assert report.diagonal_matches_degrees is True
        else:
            assert report.diagonal_matches_degrees is None


def test_rw_residual_zero_random():
    for seed in range(3):
        g = random_er(25 + 8 * seed, 0.22, seed)
        result, _ = compute_all(g)
        for length in (2, 3):
            assert rw_decompose(g, result, length).residual_is_zero


def test_rw_seen_classification():
    result, _ = compute_all(make_h())
    report = rw_decompose(make_h(), result, 3)
    assert sum(report.seen.values()) == 12
    for key, seen in report.seen.items():
        assert seen == (key in RW3_SEEN)
    assert set(report.masses) == set(RW3_SEEN)


def test_rw_worked_examples(graph_zoo):
    g = make_h()
    result, _ = compute_all(g)
    two = rw_decompose(g, result, 2)
    assert two.diagonal_matches_degrees is True
    # triangle: squared walks off the diagonal are exactly the triangle pairs
    k3 = graph_zoo["K3"]
    k3_result, _ = compute_all(k3)
    k3_report = rw_decompose(k3, k3_result, 2)
    assert k3_report.residual_is_zero
    assert k3_report.masses[(1, 1, 2)] == 0
    assert k3_report.masses[(3, 3, 1)] == 6
    # all length-3 walks between b and c decompose across four terms
    three = rw_decompose(g, result, 3)
    assert three.residual_is_zero
    b, c = 1, 2
    per_pair = {
        key: coeff * result.matrix(key).entry(b, c)
        for key, coeff in (
            ((0, 0, 1), 1), ((1, 2, 1), 1), ((2, 1, 1), 1), ((8, 8, 1), 1),
        )
    }
    assert sum(per_pair.values()) == 5
    assert per_pair[(0, 0, 1)] == 1
    assert per_pair[(8, 8, 1)] == 1


def test_rw_reports_tampered_matrix():
    g = make_h()
    result, _ = compute_all(g)
    result.matrices[(1, 1, 2)] = CountMatrix.zeros(result.n)
    report = rw_decompose(g, result, 2)
    assert not report.residual_is_zero
    assert report.residual.vol() != 0


def test_rw_rejects_bad_length():
    g = make_h()
    result, _ = compute_all(g)
    with pytest.raises(InputError):
        rw_decompose(g, result, 4)
