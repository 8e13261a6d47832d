"""Duplicate-free enumeration of 3- and 4-node induced-subgraph occurrences.

The sweeps operate on the undirected CSR plus a packed bitset:

* three-node sweep: every neighbor pair of a sweep centre is either a
  triangle edge (counted once, at the triangle's smallest corner) or the end
  pair of an induced 3-path whose centre is unique, so nothing is gated by
  degree ordering and nothing is double-counted.
* chord/clique sweep: every pair of common neighbors of an edge closes either
  a 4-clique (reached once per complementary edge — exactly the twelve
  ordered corner pairs) or a chordal 4-cycle (reached once, via its unique
  chord).
* redundancy sweep: a second pass over the same wedges that accumulates the
  right-hand sides of the linear identities used to recover the remaining
  4-node matrices, using the completed three-node counts as lookups.

Edge-supported results are kept in slot arrays (see ``kernels``); dense
results use signed 64-bit entries up to the dense cap and caller-chosen
narrower dtypes above it.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .countmatrix import DENSE_CAP, CountMatrix
from .errors import InputError
from .graph import DegreeOrderedDag, Graph
from .graphlets import Key, parse_key
from . import kernels

__all__ = [
    "SweepContext",
    "ThreeNodeCounts",
    "ChordCliqueCounts",
    "RhsAccumulators",
    "count_three_node",
    "count_chordal_cycle",
    "count_clique",
    "count_chord_and_clique",
    "accumulate_rhs",
]

#: per-worker private accumulator budget for threaded sweeps
_PRIVATE_BYTES_CAP = 1_500_000_000


def _graph_of(g: Graph | DegreeOrderedDag) -> Graph:
    if isinstance(g, DegreeOrderedDag):
        return g.graph
    if isinstance(g, Graph):
        return g
    raise InputError(f"expected a Graph or DegreeOrderedDag, got {type(g).__name__}")


@dataclass
class SweepContext:
    """Shared per-graph precomputation for all enumeration sweeps."""

    graph: Graph
    mirror: np.ndarray  # position of the reverse of every CSR slot
    bits: np.ndarray  # packed adjacency bitset, one uint64 row stripe per node

    @classmethod
    def build(cls, graph: Graph | DegreeOrderedDag) -> "SweepContext":
        g = _graph_of(graph)
        mirror = kernels.impl.build_mirror(g.n, g.indptr, g.indices)
        return cls(graph=g, mirror=mirror, bits=g.bitset())

    @property
    def slot_count(self) -> int:
        return self.graph.indices.size

    def slot_matrix(self, slots: np.ndarray, *, transposed: bool = False) -> CountMatrix:
        """Freeze a slot array into a CountMatrix.

        Slot ``p`` of row ``r`` holds the ordered entry (indices[p], r), so the
        row-major CSR data vector is the mirror gather; the transposed matrix
        reads the slots directly.
        """
        g = self.graph
        data = np.asarray(slots, dtype=np.int64)
        data = data.copy() if transposed else data[self.mirror]
        csr = sp.csr_matrix(
            (data, g.indices.astype(np.int32, copy=True), g.indptr.copy()),
            shape=(g.n, g.n),
        )
        csr.eliminate_zeros()
        if g.n <= DENSE_CAP:
            return CountMatrix.from_dense(np.asarray(csr.todense(), dtype=np.int64))
        return CountMatrix(g.n, csr=csr)


def _shard_ranges(total: int, threads: int, private_bytes: int) -> list[tuple[int, int]]:
    """Split [0, total) into per-worker ranges, or one range when threading
    would exceed the private-buffer budget."""
    threads = max(1, int(threads))
    if threads > 1 and private_bytes * threads > _PRIVATE_BYTES_CAP:
        threads = 1
    threads = min(threads, total) if total else 1
    bounds = np.linspace(0, total, threads + 1).astype(np.int64)
    ranges = [
        (int(bounds[i]), int(bounds[i + 1]))
        for i in range(threads)
        if bounds[i] < bounds[i + 1]
    ]
    return ranges or [(0, total)]


def _run_shards(shards, run_one):
    """Run one callable per shard, threaded when there are several.

    Results are collected in shard order; all accumulator merges downstream
    are exact integer additions, so any shard split reproduces the
    single-shard output bit for bit.
    """
    if len(shards) == 1:
        return [run_one(*shards[0])]
    with ThreadPoolExecutor(max_workers=len(shards)) as pool:
        futures = [pool.submit(run_one, lo, hi) for lo, hi in shards]
        return [f.result() for f in futures]


@dataclass
class ThreeNodeCounts:
    """Complete 3-node occurrence counts in sweep-native storage.

    ``end_to_centre`` and ``triangle_pairs`` are slot arrays over the CSR of
    the host graph; ``end_pair`` is dense (ends of an induced 3-path are two
    hops apart, off the edge support).
    """

    ctx: SweepContext
    path_count: int
    triangle_count: int
    end_to_centre: np.ndarray  # induced-3-path (end, centre) ordered counts
    triangle_pairs: np.ndarray  # triangle corner pair counts
    end_pair: np.ndarray  # dense induced-3-path (end, end) counts

    _cache: dict = field(default_factory=dict, repr=False)

    def matrix(self, key: Key | str) -> CountMatrix:
        """One of the four 3-node orbit-pair matrices by key."""
        k = parse_key(key) if isinstance(key, str) else key
        if k in self._cache:
            return self._cache[k]
        if k == (1, 2, 1):
            out = self.ctx.slot_matrix(self.end_to_centre)
        elif k == (2, 1, 1):
            out = self.ctx.slot_matrix(self.end_to_centre, transposed=True)
        elif k == (3, 3, 1):
            out = self.ctx.slot_matrix(self.triangle_pairs)
        elif k == (1, 1, 2):
            dense = self.end_pair
            if dense.dtype != np.int64 and self.ctx.graph.n <= DENSE_CAP:
                dense = np.asarray(dense, dtype=np.int64)
            out = CountMatrix.from_dense(dense, keep_dense=True)
        else:
            raise InputError(f"not a 3-node matrix key: {k}")
        self._cache[k] = out
        return out


def count_three_node(
    dag: Graph | DegreeOrderedDag,
    threads: int = 1,
    *,
    ctx: SweepContext | None = None,
    end_pair_dtype=np.int64,
) -> ThreeNodeCounts:
    """Sweep all wedges once, producing every 3-node count."""
    ctx = ctx or SweepContext.build(dag)
    g = ctx.graph
    nnz = ctx.slot_count
    a12 = np.zeros(nnz, dtype=np.int64)
    a33 = np.zeros(nnz, dtype=np.int64)
    a11_2 = np.zeros((g.n, g.n), dtype=end_pair_dtype)

    private = 2 * nnz * 8 + a11_2.nbytes
    shards = _shard_ranges(g.n, threads, private)

    def run_one(lo, hi):
        if (lo, hi) == (0, g.n):
            return kernels.impl.three_node_pass(
                g.n, g.indptr, g.indices, ctx.mirror, ctx.bits, lo, hi, a12, a33, a11_2
            )
        p12 = np.zeros_like(a12)
        p33 = np.zeros_like(a33)
        p11 = np.zeros_like(a11_2)
        counts = kernels.impl.three_node_pass(
            g.n, g.indptr, g.indices, ctx.mirror, ctx.bits, lo, hi, p12, p33, p11
        )
        return counts, p12, p33, p11

    results = _run_shards(shards, run_one)
    if len(shards) == 1:
        paths, triangles = results[0]
    else:
        paths = triangles = 0
        for (p, t), p12, p33, p11 in results:
            paths += int(p)
            triangles += int(t)
            a12 += p12
            a33 += p33
            a11_2 += p11
    return ThreeNodeCounts(
        ctx=ctx,
        path_count=int(paths),
        triangle_count=int(triangles),
        end_to_centre=a12,
        triangle_pairs=a33,
        end_pair=a11_2,
    )


@dataclass
class ChordCliqueCounts:
    """4-clique corner pairs (slot array) and chordal-4-cycle degree-2 pairs
    (dense: those nodes are never adjacent)."""

    ctx: SweepContext
    clique_pairs: np.ndarray
    chord_opposite: np.ndarray

    def clique_matrix(self) -> CountMatrix:
        return self.ctx.slot_matrix(self.clique_pairs)

    def chord_matrix(self) -> CountMatrix:
        dense = self.chord_opposite
        if dense.dtype != np.int64 and self.ctx.graph.n <= DENSE_CAP:
            dense = np.asarray(dense, dtype=np.int64)
        return CountMatrix.from_dense(dense, keep_dense=True)


def count_chord_and_clique(
    dag: Graph | DegreeOrderedDag,
    threads: int = 1,
    *,
    ctx: SweepContext | None = None,
    chord_dtype=np.int64,
) -> ChordCliqueCounts:
    """Sweep common neighborhoods of all edges once, producing both 4-dense
    counts (cliques on the edge support, chordal-cycle opposite pairs off it)."""
    ctx = ctx or SweepContext.build(dag)
    g = ctx.graph
    nnz = ctx.slot_count
    a1414 = np.zeros(nnz, dtype=np.int64)
    a1212 = np.zeros((g.n, g.n), dtype=chord_dtype)
    max_deg = int(np.diff(g.indptr).max(initial=0))

    private = nnz * 8 + a1212.nbytes
    shards = _shard_ranges(g.n, threads, private)

    def run_one(lo, hi):
        scratch = np.empty(max_deg, dtype=np.int64)
        if (lo, hi) == (0, g.n):
            kernels.impl.chord_clique_pass(
                g.n, g.indptr, g.indices, ctx.mirror, ctx.bits, lo, hi, a1414, a1212, scratch
            )
            return None
        p14 = np.zeros_like(a1414)
        p12 = np.zeros_like(a1212)
        kernels.impl.chord_clique_pass(
            g.n, g.indptr, g.indices, ctx.mirror, ctx.bits, lo, hi, p14, p12, scratch
        )
        return p14, p12

    results = _run_shards(shards, run_one)
    if len(shards) > 1:
        for p14, p12 in results:
            a1414 += p14
            a1212 += p12
    return ChordCliqueCounts(ctx=ctx, clique_pairs=a1414, chord_opposite=a1212)


def count_clique(dag: Graph | DegreeOrderedDag, threads: int = 1) -> CountMatrix:
    """Adjacency of 4-clique corners (all on the same orbit), one matrix."""
    return count_chord_and_clique(dag, threads).clique_matrix()


def count_chordal_cycle(dag: Graph | DegreeOrderedDag, threads: int = 1) -> CountMatrix:
    """Adjacency of the two degree-2 corners of chordal 4-cycles."""
    return count_chord_and_clique(dag, threads).chord_matrix()


@dataclass
class RhsAccumulators:
    """Right-hand sides of the redundancy identities.

    ``edge_*`` are slot arrays holding per-ordered-pair sums accumulated on
    the edge support (single-hop system); ``far_*`` are dense matrices over
    induced-3-path end pairs (double-hop system).  ``far_*`` entries are None
    when masked out of the sweep.
    """

    ctx: SweepContext
    edge_a: np.ndarray
    edge_b: np.ndarray
    edge_c: np.ndarray
    edge_d: np.ndarray
    edge_e: np.ndarray
    edge_f: np.ndarray
    edge_g: np.ndarray
    edge_h: np.ndarray
    edge_i: np.ndarray
    edge_j: np.ndarray
    far_end_minus: np.ndarray | None  # acc 4a
    far_triangle: np.ndarray | None  # acc 4b
    far_centre: np.ndarray | None  # acc 4c
    far_shared: np.ndarray | None  # acc 4d


def accumulate_rhs(
    dag: Graph | DegreeOrderedDag,
    three: ThreeNodeCounts,
    threads: int = 1,
    *,
    eq4_mask: int = 15,
    far_dtype=np.int64,
    edge_out: list[np.ndarray] | None = None,
) -> RhsAccumulators:
    """Second wedge sweep accumulating every redundancy right-hand side.

    ``eq4_mask`` selects which dense double-hop accumulators to produce
    (bit 0: far_end_minus, bit 1: far_triangle, bit 2: far_centre,
    bit 3: far_shared) so large runs can split them across sweeps.
    ``edge_out`` reuses ten caller-owned per-slot arrays for the edge
    accumulators instead of allocating fresh ones; they are zeroed here.
    """
    ctx = three.ctx
    g = ctx.graph
    nnz = ctx.slot_count
    if edge_out is None:
        edge = [np.zeros(nnz, dtype=np.int64) for _ in range(10)]
    else:
        edge = edge_out
        for arr in edge:
            arr[:] = 0
    shape = (g.n, g.n)
    none = np.zeros((0, 0), dtype=far_dtype)
    acc4a = np.zeros(shape, dtype=far_dtype) if eq4_mask & 1 else none
    acc4b = np.zeros(shape, dtype=far_dtype) if eq4_mask & 2 else none
    acc4c = np.zeros(shape, dtype=far_dtype) if eq4_mask & 4 else none
    acc4d = np.zeros(shape, dtype=far_dtype) if eq4_mask & 8 else none

    dense_count = bin(eq4_mask & 15).count("1")
    private = 10 * nnz * 8 + dense_count * g.n * g.n * np.dtype(far_dtype).itemsize
    shards = _shard_ranges(g.n, threads, private)

    def run_one(lo, hi):
        if (lo, hi) == (0, g.n):
            kernels.impl.rhs_pass(
                g.n, g.indptr, g.indices, ctx.mirror, ctx.bits, lo, hi,
                three.end_to_centre, three.triangle_pairs, three.end_pair,
                *edge, acc4a, acc4b, acc4c, acc4d, eq4_mask,
            )
            return None
        p_edge = [np.zeros_like(e) for e in edge]
        p4 = [np.zeros_like(a) for a in (acc4a, acc4b, acc4c, acc4d)]
        kernels.impl.rhs_pass(
            g.n, g.indptr, g.indices, ctx.mirror, ctx.bits, lo, hi,
            three.end_to_centre, three.triangle_pairs, three.end_pair,
            *p_edge, *p4, eq4_mask,
        )
        return p_edge, p4

    results = _run_shards(shards, run_one)
    if len(shards) > 1:
        for p_edge, p4 in results:
            for tgt, src in zip(edge, p_edge):
                tgt += src
            for tgt, src in zip((acc4a, acc4b, acc4c, acc4d), p4):
                if tgt.size:
                    tgt += src
    return RhsAccumulators(
        ctx=ctx,
        edge_a=edge[0], edge_b=edge[1], edge_c=edge[2], edge_d=edge[3],
        edge_e=edge[4], edge_f=edge[5], edge_g=edge[6], edge_h=edge[7],
        edge_i=edge[8], edge_j=edge[9],
        far_end_minus=acc4a if eq4_mask & 1 else None,
        far_triangle=acc4b if eq4_mask & 2 else None,
        far_centre=acc4c if eq4_mask & 4 else None,
        far_shared=acc4d if eq4_mask & 8 else None,
    )
