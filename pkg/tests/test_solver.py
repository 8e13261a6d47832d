"""End-to-end solver tests: every recovered matrix must equal the census."""

import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_h, random_er, zoo
from orbitadj import solver
from orbitadj.countmatrix import CountMatrix
from orbitadj.enumeration import (
    accumulate_rhs,
    count_chord_and_clique,
    count_three_node,
)
from orbitadj.errors import InputError, ResourceCapError
from orbitadj.graph import DegreeOrderedDag, Graph
from orbitadj.graphlets import ORDERED_KEYS, RW3_SEEN, format_key
from orbitadj.oracle import brute_force_all
from orbitadj.solver import (
    OrbitAdjacencySet,
    compute_all,
    compute_triple_hop,
    solve_double_hop,
    solve_single_hop,
)

PHASES = (
    "setup", "three_node", "chord_clique", "rhs",
    "solve_double", "solve_single", "assemble", "walks", "total",
)


def _assert_full_set_matches_oracle(g: Graph, result: OrbitAdjacencySet) -> None:
    oracle = brute_force_all(g)
    for key in ORDERED_KEYS:
        np.testing.assert_array_equal(
            result.matrix(key).to_dense(),
            oracle.matrix(key),
            err_msg=format_key(key),
        )


@pytest.mark.parametrize("name", sorted(zoo()))
def test_compute_all_matches_oracle_zoo(name, graph_zoo):
    g = graph_zoo[name]
    result, report = compute_all(g)
    _assert_full_set_matches_oracle(g, result)
    assert report.consistency_residual == 0
    assert report.negative_entry_count == 0
    assert report.mode == "dense"
    for phase in PHASES:
        assert phase in report.timings


def test_compute_all_matches_oracle_random():
    for seed in range(4):
        g = random_er(24 + 7 * seed, 0.18, seed)
        result, _ = compute_all(g)
        _assert_full_set_matches_oracle(g, result)


@settings(max_examples=15, deadline=None)
@given(
    n=st.integers(min_value=4, max_value=12),
    density=st.floats(min_value=0.15, max_value=0.8),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_compute_all_matches_oracle_property(n, density, seed):
    g = random_er(n, density, seed)
    result, report = compute_all(g)
    _assert_full_set_matches_oracle(g, result)
    assert report.consistency_residual == 0


def test_compute_all_accepts_preordered_dag():
    g = random_er(20, 0.3, 1)
    direct, _ = compute_all(g)
    via_dag, _ = compute_all(DegreeOrderedDag(g))
    for key in ORDERED_KEYS:
        assert direct.matrix(key).equals(via_dag.matrix(key))


def test_report_counts_match_matrix_volumes():
    g = random_er(30, 0.22, 4)
    result, report = compute_all(g)
    assert 2 * report.path_count == result.matrix((1, 2, 1)).vol()
    assert 6 * report.triangle_count == result.matrix((3, 3, 1)).vol()


# ---------------------------------------------------------------------------
# worked examples with hand-checkable values


def test_h_graph_examples():
    # labels: a=0 b=1 c=2 d=3 e=4; edges a-b, b-c, b-e, c-d, d-e
    result, _ = compute_all(make_h())
    assert result.matrix("o6-o6-h2").entry(2, 4) == 1  # claw leaves c,e via hub b
    assert result.matrix("o8-o8-h2").entry(2, 4) == 1  # opposite in cycle b-c-d-e
    assert result.matrix("o8-o8-h2").entry(1, 3) == 1
    assert result.matrix("o4-o4-h3").entry(0, 3) == 2  # a to d along both 4-paths
    assert result.matrix("o4-o4-h3").entry(3, 0) == 2


def test_cycle4_examples(graph_zoo):
    result, _ = compute_all(graph_zoo["C4"])
    adjacent = result.matrix("o8-o8-h1").to_dense()
    opposite = result.matrix("o8-o8-h2").to_dense()
    ring = np.zeros((4, 4), dtype=np.int64)
    for u, v in ((0, 1), (1, 2), (2, 3), (3, 0)):
        ring[u, v] = ring[v, u] = 1
    np.testing.assert_array_equal(adjacent, ring)
    across = np.zeros((4, 4), dtype=np.int64)
    across[0, 2] = across[2, 0] = across[1, 3] = across[3, 1] = 1
    np.testing.assert_array_equal(opposite, across)


def test_claw_examples(graph_zoo):
    result, _ = compute_all(graph_zoo["claw"])  # hub is node 0
    leaves = result.matrix("o6-o6-h2").to_dense()
    expected = np.ones((4, 4), dtype=np.int64)
    expected[0, :] = expected[:, 0] = 0
    np.fill_diagonal(expected, 0)
    np.testing.assert_array_equal(leaves, expected)
    hub = result.matrix("o7-o6-h1").to_dense()
    assert hub[0, 1] == hub[0, 2] == hub[0, 3] == 1
    assert hub.sum() == 3


def test_path4_examples(graph_zoo):
    result, _ = compute_all(graph_zoo["P4"])  # 0-1-2-3
    assert result.matrix("o4-o5-h1").entry(0, 1) == 1
    assert result.matrix("o4-o5-h1").entry(3, 2) == 1
    assert result.matrix("o5-o4-h1").entry(1, 0) == 1
    assert result.matrix("o4-o4-h3").entry(0, 3) == 1
    assert result.matrix("o4-o4-h3").to_dense().sum() == 2


def test_complete4_examples(graph_zoo):
    result, _ = compute_all(graph_zoo["K4"])
    full = np.ones((4, 4), dtype=np.int64)
    np.fill_diagonal(full, 0)
    np.testing.assert_array_equal(result.matrix("o14-o14-h1").to_dense(), full)
    np.testing.assert_array_equal(result.matrix("o3-o3-h1").to_dense(), 2 * full)
    for key in ORDERED_KEYS:
        if key in ((0, 0, 1), (3, 3, 1), (14, 14, 1)):
            continue
        assert result.matrix(key).nnz == 0, format_key(key)


# ---------------------------------------------------------------------------
# public partial solvers


def test_solve_single_and_double_hop_public_api():
    g = random_er(28, 0.3, 5)
    oracle = brute_force_all(g)
    three = count_three_node(g)
    rhs = accumulate_rhs(g, three)
    cc = count_chord_and_clique(g)
    singles, residual = solve_single_hop(rhs, cc.clique_matrix())
    assert residual == 0
    assert set(singles) == set(solver._SINGLE_HOP_KEYS)
    for key, matrix in singles.items():
        np.testing.assert_array_equal(
            matrix.to_dense(), oracle.matrix(key), err_msg=format_key(key)
        )
    doubles = solve_double_hop(rhs, cc.chord_matrix())
    assert set(doubles) == set(solver._DOUBLE_HOP_KEYS)
    for key, matrix in doubles.items():
        np.testing.assert_array_equal(
            matrix.to_dense(), oracle.matrix(key), err_msg=format_key(key)
        )


def test_solve_double_hop_requires_full_sweep():
    g = random_er(15, 0.3, 2)
    three = count_three_node(g)
    partial = accumulate_rhs(g, three, eq4_mask=10)
    cc = count_chord_and_clique(g)
    with pytest.raises(InputError):
        solve_double_hop(partial, cc.chord_matrix())


def test_compute_triple_hop_from_known_set():
    g = random_er(26, 0.25, 8)
    result, _ = compute_all(g)
    oracle = brute_force_all(g)
    rebuilt = compute_triple_hop(g, result)
    np.testing.assert_array_equal(rebuilt.to_dense(), oracle.matrix((4, 4, 3)))
    known = {k: result.matrix(k) for k in ORDERED_KEYS if k != (4, 4, 3)}
    rebuilt_from_dict = compute_triple_hop(g, known)
    np.testing.assert_array_equal(
        rebuilt_from_dict.to_dense(), oracle.matrix((4, 4, 3))
    )


# ---------------------------------------------------------------------------
# result-set container behaviour


def test_orbit_set_validates_and_looks_up():
    g = make_h()
    result, _ = compute_all(g)
    assert result.n == 5
    assert result.matrix("o0-0").equals(result.matrix((0, 0, 1)))
    with pytest.raises(InputError):
        result.matrix((0, 0, 2))
    with pytest.raises(InputError):
        OrbitAdjacencySet(g, {(0, 0, 1): result.matrix((0, 0, 1))})
    assert list(result.keys()) == list(ORDERED_KEYS)


def test_random_walk_visibility_flags():
    result, _ = compute_all(make_h())
    assert sum(result.seen_by_rw3.values()) == 12
    for key, seen in result.seen_by_rw3.items():
        assert seen == (key in RW3_SEEN)


# ---------------------------------------------------------------------------
# degenerate graphs


def test_edgeless_and_tiny_graphs():
    for g in (Graph(5, []), Graph(1, []), Graph(2, [(0, 1)])):
        result, report = compute_all(g)
        oracle = brute_force_all(g)
        for key in ORDERED_KEYS:
            np.testing.assert_array_equal(
                result.matrix(key).to_dense(), oracle.matrix(key)
            )
        assert report.consistency_residual == 0


# ---------------------------------------------------------------------------
# determinism and far-sweep splitting


@pytest.mark.parametrize("threads", [2, 5])
def test_thread_count_does_not_change_results(threads):
    g = random_er(32, 0.25, 6)
    base, _ = compute_all(g, threads=1)
    other, report = compute_all(g, threads=threads)
    assert report.threads == threads
    for key in ORDERED_KEYS:
        np.testing.assert_array_equal(
            base.matrix(key).to_dense(),
            other.matrix(key).to_dense(),
            err_msg=format_key(key),
        )


@pytest.mark.parametrize(
    "groups",
    [
        [solver._FAR_TRIANGLE | solver._FAR_SHARED, solver._FAR_END | solver._FAR_CENTRE],
        [solver._FAR_TRIANGLE, solver._FAR_SHARED, solver._FAR_END, solver._FAR_CENTRE],
    ],
)
def test_split_far_sweeps_match_single_sweep(groups, monkeypatch):
    real = solver._make_plan

    def forced(g, workdir):
        plan = real(g, workdir)
        plan.far_groups = list(groups)
        return plan

    monkeypatch.setattr(solver, "_make_plan", forced)
    g = random_er(30, 0.25, 12)
    result, report = compute_all(g)
    _assert_full_set_matches_oracle(g, result)
    assert report.consistency_residual == 0


# ---------------------------------------------------------------------------
# staged (disk-backed) mode


def test_staged_mode_matches_dense_mode(tmp_path, monkeypatch):
    g = random_er(2100, 0.004, 21)
    staged, staged_report = compute_all(g, workdir=str(tmp_path / "spill"))
    assert staged_report.mode == "staged"
    assert staged.workdir() == str(tmp_path / "spill")
    spilled = {p.name for p in (tmp_path / "spill").iterdir()}
    assert "o4-o4-h3.npy" in spilled
    assert "o12-o12-h2.npy" in spilled

    monkeypatch.setattr(solver, "DENSE_CAP", 10**9)
    dense, dense_report = compute_all(g)
    assert dense_report.mode == "dense"
    for key in ORDERED_KEYS:
        np.testing.assert_array_equal(
            staged.matrix(key).to_dense(),
            dense.matrix(key).to_dense(),
            err_msg=format_key(key),
        )
    assert staged_report.consistency_residual == 0


def test_staged_cleanup_removes_owned_spill_dir():
    g = random_er(2080, 0.003, 5)
    with compute_all(g)[0] as result:
        wd = result.workdir()
        assert wd is not None and len(os.listdir(wd)) > 0
    assert not os.path.isdir(wd)


# ---------------------------------------------------------------------------
# resource guards


def test_node_cap_refused_up_front():
    g = Graph(solver.TRIPLE_HOP_NODE_CAP + 1, [])
    with pytest.raises(ResourceCapError):
        compute_all(g)
    with pytest.raises(ResourceCapError):
        compute_triple_hop(g, {})


def test_memory_budget_refused(monkeypatch):
    from types import SimpleNamespace

    monkeypatch.setattr(
        solver.psutil, "virtual_memory",
        lambda: SimpleNamespace(available=400_000_000),
    )
    g = random_er(4000, 0.002, 3)
    with pytest.raises(ResourceCapError):
        compute_all(g)
