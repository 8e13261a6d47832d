"""Ground-truth census by exhaustive enumeration of 3- and 4-node subsets.

This module is the arbiter for every correctness test in the package.  It
shares no algorithmic machinery with the production pipeline: instead of
degree-ordered traversal and equation solving, it visits every node subset of
size 3 and 4, classifies the induced subgraph by its (size, edge count,
degree) signature, and tallies

* all 28 role-pair co-occurrence matrices,
* the per-node 15-orbit count vectors, and
* a direct per-graphlet co-occurrence census (which the production side must
  reproduce as a sum over that graphlet's keys).

Cost is Theta(n^4) subsets, so a node cap applies (default 500).  Hop
distances between subset members are measured inside the induced subgraph,
never in the host graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .countmatrix import CountMatrix
from .errors import ResourceCapError
from .graph import Graph
from .graphlets import ORDERED_KEYS, TEMPLATES, Key
from .kernels import maybe_jit

__all__ = ["OracleResult", "brute_force_all", "ORACLE_NODE_CAP"]

ORACLE_NODE_CAP = 500

#: key index lookup: (orbit_i, orbit_j, hops) -> position in ORDERED_KEYS
_KEY_INDEX = np.full((15, 15, 4), -1, dtype=np.int8)
for _idx, (_i, _j, _h) in enumerate(ORDERED_KEYS):
    _KEY_INDEX[_i, _j, _h] = _idx

#: orbit of a node given (graphlet class, degree inside the subgraph)
_ORBIT_OF = np.full((9, 4), -1, dtype=np.int8)
for _t in TEMPLATES:
    for _node, _orb in enumerate(_t.orbits):
        _ORBIT_OF[_t.index, _t.degree(_node)] = _orb


@dataclass
class OracleResult:
    """Dense ground-truth counts for one graph."""

    n: int
    matrices: dict[Key, np.ndarray]
    gdv: np.ndarray
    graphlet_adjacency: dict[int, np.ndarray]

    def matrix(self, key: Key) -> np.ndarray:
        return self.matrices[key]

    def count_matrix(self, key: Key) -> CountMatrix:
        return CountMatrix.from_dense(self.matrices[key])


@maybe_jit(inline="always")
def _bit(bits, u, v):  # pragma: no cover - jitted
    return int((bits[u, v >> 6] >> np.uint64(v & 63)) & np.uint64(1))


@maybe_jit
def _tally(size, cls, sub, deg, adj, key_index, orbit_of, orbadj, gdv, gadj):  # pragma: no cover
    for x in range(size):
        gdv[sub[x], orbit_of[cls, deg[x]]] += 1
    for x in range(size):
        ox = orbit_of[cls, deg[x]]
        for y in range(size):
            if x == y:
                continue
            # hop distance inside the induced subgraph: 1 = edge, 2 = shared
            # member, else 3 (diameter bound for connected <=4-node graphs).
            if adj[x, y]:
                dist = 1
            else:
                dist = 3
                for w in range(size):
                    if w != x and w != y and adj[x, w] and adj[w, y]:
                        dist = 2
                        break
            k = key_index[ox, orbit_of[cls, deg[y]], dist]
            orbadj[k, sub[x], sub[y]] += 1
            gadj[cls, sub[x], sub[y]] += 1


@maybe_jit
def _census(n, indptr, indices, bits, key_index, orbit_of):  # pragma: no cover - jitted
    orbadj = np.zeros((28, n, n), dtype=np.int64)
    gdv = np.zeros((n, 15), dtype=np.int64)
    gadj = np.zeros((9, n, n), dtype=np.int64)

    sub = np.empty(4, dtype=np.int64)
    deg = np.empty(4, dtype=np.int64)
    adj = np.zeros((4, 4), dtype=np.int64)

    # 2-node occurrences: every edge, both endpoints on orbit 0.
    k00 = key_index[0, 0, 1]
    for u in range(n):
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if u < v:
                gdv[u, 0] += 1
                gdv[v, 0] += 1
                orbadj[k00, u, v] += 1
                orbadj[k00, v, u] += 1
                gadj[0, u, v] += 1
                gadj[0, v, u] += 1

    for a in range(n):
        for b in range(a + 1, n):
            e_ab = _bit(bits, a, b)
            for c in range(b + 1, n):
                e_ac = _bit(bits, a, c)
                e_bc = _bit(bits, b, c)
                ec3 = e_ab + e_ac + e_bc
                if ec3 >= 2:
                    sub[0], sub[1], sub[2] = a, b, c
                    adj[0, 1] = adj[1, 0] = e_ab
                    adj[0, 2] = adj[2, 0] = e_ac
                    adj[1, 2] = adj[2, 1] = e_bc
                    deg[0] = e_ab + e_ac
                    deg[1] = e_ab + e_bc
                    deg[2] = e_ac + e_bc
                    cls = 2 if ec3 == 3 else 1
                    _tally(3, cls, sub, deg, adj, key_index, orbit_of, orbadj, gdv, gadj)
                for d in range(c + 1, n):
                    e_ad = _bit(bits, a, d)
                    e_bd = _bit(bits, b, d)
                    e_cd = _bit(bits, c, d)
                    ec = e_ab + e_ac + e_bc + e_ad + e_bd + e_cd
                    if ec < 3:
                        continue
                    deg[0] = e_ab + e_ac + e_ad
                    deg[1] = e_ab + e_bc + e_bd
                    deg[2] = e_ac + e_bc + e_cd
                    deg[3] = e_ad + e_bd + e_cd
                    if ec == 3 and (deg[0] == 0 or deg[1] == 0 or deg[2] == 0 or deg[3] == 0):
                        continue  # three edges among three nodes plus an isolate
                    maxdeg = max(deg[0], deg[1], deg[2], deg[3])
                    if ec == 3:
                        cls = 4 if maxdeg == 3 else 3
                    elif ec == 4:
                        cls = 6 if maxdeg == 3 else 5
                    elif ec == 5:
                        cls = 7
                    else:
                        cls = 8
                    sub[0], sub[1], sub[2], sub[3] = a, b, c, d
                    adj[0, 1] = adj[1, 0] = e_ab
                    adj[0, 2] = adj[2, 0] = e_ac
                    adj[0, 3] = adj[3, 0] = e_ad
                    adj[1, 2] = adj[2, 1] = e_bc
                    adj[1, 3] = adj[3, 1] = e_bd
                    adj[2, 3] = adj[3, 2] = e_cd
                    _tally(4, cls, sub, deg, adj, key_index, orbit_of, orbadj, gdv, gadj)
    return orbadj, gdv, gadj


def brute_force_all(graph: Graph, cap: int = ORACLE_NODE_CAP) -> OracleResult:
    """Exhaustive census of ``graph``; refuses when graph.n exceeds ``cap``."""
    if graph.n > cap:
        raise ResourceCapError(
            f"brute-force census capped at {cap} nodes, got {graph.n}"
        )
    bits = graph.bitset() if graph.n else np.zeros((0, 1), dtype=np.uint64)
    orbadj, gdv, gadj = _census(
        graph.n,
        graph.indptr,
        graph.indices.astype(np.int64),
        bits,
        _KEY_INDEX,
        _ORBIT_OF,
    )
    matrices = {key: orbadj[i] for i, key in enumerate(ORDERED_KEYS)}
    gadj_map = {k: gadj[k] for k in range(9)}
    return OracleResult(graph.n, matrices, gdv, gadj_map)
