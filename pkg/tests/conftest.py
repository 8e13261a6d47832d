"""Shared fixtures: the worked example graph and a small zoo of named graphs."""

from __future__ import annotations

import numpy as np
import pytest

from orbitadj.graph import Graph

# The five-node worked example used throughout the docs and golden tests:
# edges a-b, b-c, b-e, c-d, d-e with alphabetical ids a=0..e=4.
H_LABELS = ("a", "b", "c", "d", "e")
H_EDGES = ((0, 1), (1, 2), (1, 4), (2, 3), (3, 4))

H_EDGE_TEXT = "a b\nb c\nb e\nc d\nd e\n"


def make_h() -> Graph:
    return Graph(5, H_EDGES, labels=H_LABELS)


def complete_graph(k: int) -> Graph:
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    return Graph(k, edges)


def cycle_graph(k: int) -> Graph:
    return Graph(k, [(i, (i + 1) % k) for i in range(k)])


def path_graph(k: int) -> Graph:
    return Graph(k, [(i, i + 1) for i in range(k - 1)])


def star_graph(leaves: int) -> Graph:
    """Hub node 0 with the given number of leaves."""
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def paw_graph() -> Graph:
    """Pendant 0 attached to apex 1 of triangle {1, 2, 3}."""
    return Graph(4, [(0, 1), (1, 2), (1, 3), (2, 3)])


def diamond_graph() -> Graph:
    """4-clique minus the edge {2, 3}; nodes 0 and 1 have degree 3."""
    return Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])


def zoo() -> dict[str, Graph]:
    return {
        "H": make_h(),
        "K3": complete_graph(3),
        "K4": complete_graph(4),
        "K5": complete_graph(5),
        "C4": cycle_graph(4),
        "C5": cycle_graph(5),
        "P4": path_graph(4),
        "P5": path_graph(5),
        "claw": star_graph(3),
        "star4": star_graph(4),
        "paw": paw_graph(),
        "diamond": diamond_graph(),
    }


@pytest.fixture
def h_graph() -> Graph:
    return make_h()


@pytest.fixture
def graph_zoo() -> dict[str, Graph]:
    return zoo()


def random_er(n: int, density: float, seed: int) -> Graph:
    """Small seeded ER graph for property tests (rejects the empty outcome)."""
    rng = np.random.default_rng(seed)
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    ]
    if not edges:
        edges = [(0, 1)]
    return Graph(n, edges)
