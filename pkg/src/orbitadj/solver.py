"""Recover every orbit-pair adjacency matrix from the enumeration sweeps.

Six matrices come straight from the sweeps (plain adjacency, path end/centre,
path end pairs, triangle pairs, chordal-cycle opposite pairs, 4-clique pairs).
The remaining single-hop matrices come from back-substituting the edge-
supported redundancy identities, the remaining double-hop matrices from the
dense far-pair identities, and the lone triple-hop matrix from the cube of
the adjacency matrix minus the walk contributions of every other matrix two
orbit-4 endpoints can produce.

Every equation here was certified against the brute-force census before this
module existed (see tests/test_enumeration.py); the solver turns the one
redundant identity into a runtime self-check instead of discarding it.

Large graphs run a staged plan: narrow integer dtypes, dense accumulators
spilled to disk between phases, and the four far accumulators swept in one,
two, or four passes depending on how many fit in memory at once (each is
solvable on its own once its predecessors are on disk).  The node cap for
the cube phase and the memory budget are enforced up front with a resource
error instead of thrashing.
"""

from __future__ import annotations

import os
import shutil
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np
import psutil
import scipy.sparse as sp
from numpy.lib.format import open_memmap

from . import kernels
from .countmatrix import DENSE_CAP, CountMatrix
from .enumeration import (
    RhsAccumulators,
    SweepContext,
    ThreeNodeCounts,
    _shard_ranges,
    _run_shards,
    accumulate_rhs,
    count_chord_and_clique,
    count_three_node,
)
from .errors import InconsistencyError, InputError, ResourceCapError
from .graph import DegreeOrderedDag, Graph
from .graphlets import (
    ORDERED_KEYS,
    RW3_SEEN,
    WALK3_COEFF,
    Key,
    format_key,
    parse_key,
)

__all__ = [
    "OrbitAdjacencySet",
    "SolveReport",
    "TRIPLE_HOP_NODE_CAP",
    "solve_single_hop",
    "solve_double_hop",
    "compute_triple_hop",
    "compute_all",
]

#: hard node cap for the adjacency-cube phase (documented cubic-cost wall)
TRIPLE_HOP_NODE_CAP = 50_000

#: row-block height for out-of-core dense work
_BLOCK_ROWS = 1024

#: single-hop outputs in dependency order
_SINGLE_HOP_KEYS = (
    (12, 13, 1),
    (13, 13, 1),
    (8, 8, 1),
    (10, 10, 1),
    (10, 11, 1),
    (6, 7, 1),
    (9, 11, 1),
    (5, 5, 1),
    (4, 5, 1),
)

_DOUBLE_HOP_KEYS = ((9, 10, 2), (8, 8, 2), (6, 6, 2), (4, 5, 2))

#: far-accumulator mask bits (matching accumulate_rhs) in solve order:
#: the triangle and shared-end sides only need the chord matrix, the other
#: two need those solved first.
_FAR_TRIANGLE, _FAR_SHARED, _FAR_END, _FAR_CENTRE = 2, 8, 1, 4
_FAR_ALL = 15


# ---------------------------------------------------------------------------
# result containers


@dataclass
class SolveReport:
    """Solver self-check outcome and per-phase wall times."""

    consistency_residual: int = 0
    negative_entry_count: int = 0
    timings: dict[str, float] = field(default_factory=dict)
    path_count: int = 0
    triangle_count: int = 0
    implementation: str = ""
    threads: int = 1
    mode: str = "dense"


class OrbitAdjacencySet:
    """All 28 orbit-pair adjacency matrices of one graph, keyed by
    (row orbit, column orbit, hop distance)."""

    def __init__(
        self,
        graph: Graph,
        matrices: dict[Key, CountMatrix],
        workdir: str | None = None,
        owns_workdir: bool = False,
    ):
        missing = [k for k in ORDERED_KEYS if k not in matrices]
        if missing:
            raise InputError(f"incomplete matrix set, missing {missing}")
        self.graph = graph
        self.matrices = matrices
        self.seen_by_rw3 = {k: k in RW3_SEEN for k in ORDERED_KEYS}
        self._workdir = workdir
        self._owns_workdir = owns_workdir

    @property
    def n(self) -> int:
        return self.graph.n

    def matrix(self, key: Key | str) -> CountMatrix:
        k = parse_key(key) if isinstance(key, str) else key
        try:
            return self.matrices[k]
        except KeyError:
            raise InputError(f"unknown matrix key {format_key(k)}") from None

    def keys(self):
        return iter(ORDERED_KEYS)

    def workdir(self) -> str | None:
        """Spill directory backing at-scale matrices, if any."""
        return self._workdir

    def cleanup(self) -> None:
        """Delete the owned spill directory; disk-backed matrices become
        invalid afterwards."""
        if self._owns_workdir and self._workdir and os.path.isdir(self._workdir):
            shutil.rmtree(self._workdir, ignore_errors=True)
        self._owns_workdir = False

    def __enter__(self) -> "OrbitAdjacencySet":
        return self

    def __exit__(self, *exc) -> None:
        self.cleanup()


# ---------------------------------------------------------------------------
# shared small helpers


def _slot_pair(ctx: SweepContext, slot: int) -> tuple[int, int]:
    """Ordered (row, col) node pair stored at a CSR slot."""
    g = ctx.graph
    holder = int(np.searchsorted(g.indptr, slot, side="right") - 1)
    return int(g.indices[slot]), holder


def _first_bad_slot(ctx, mask) -> tuple[int, int]:
    return _slot_pair(ctx, int(np.flatnonzero(mask)[0]))


def _require_even_slots(ctx, values, label):
    odd = (values & 1) != 0
    if odd.any():
        x, y = _first_bad_slot(ctx, odd)
        raise InconsistencyError(
            f"single-hop identity ({label}) leaves an odd count at pair ({x}, {y})"
        )


def _require_nonneg_slots(ctx, values, key):
    neg = values < 0
    if neg.any():
        x, y = _first_bad_slot(ctx, neg)
        raise InconsistencyError(
            f"solved matrix {format_key(key)} negative at pair ({x}, {y})"
        )


def _blocked(n: int, block: int = _BLOCK_ROWS):
    for lo in range(0, n, block):
        yield lo, min(lo + block, n)


def _first_dense_pair(arr, mask_fn) -> tuple[int, int] | None:
    for lo, hi in _blocked(arr.shape[0]):
        block = np.asarray(arr[lo:hi])
        bad = mask_fn(block)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            return int(r) + lo, int(c)
    return None


def _require_nonneg_dense(arr, what):
    hit = _first_dense_pair(arr, lambda b: b < 0)
    if hit is not None:
        raise InconsistencyError(f"{what} negative at pair {hit}")


def _require_even_dense(arr, label):
    hit = _first_dense_pair(arr, lambda b: (b & 1) != 0)
    if hit is not None:
        raise InconsistencyError(
            f"double-hop identity ({label}) leaves an odd count at pair {hit}"
        )


class _Timer:
    def __init__(self, timings: dict[str, float]):
        self.timings = timings
        self.t0 = time.perf_counter()

    def lap(self, name: str) -> None:
        now = time.perf_counter()
        self.timings[name] = self.timings.get(name, 0.0) + now - self.t0
        self.t0 = now


# ---------------------------------------------------------------------------
# single-hop system


def _solve_single_slots(
    ctx: SweepContext, rhs: RhsAccumulators, clique_pairs: np.ndarray
) -> tuple[dict[Key, np.ndarray], int]:
    """Back-substitute the edge-supported identities on raw slot arrays.

    Returns the nine solved slot arrays plus the max absolute residual of the
    leftover identity (h), which must be zero.
    """
    out: dict[Key, np.ndarray] = {}
    a1414 = clique_pairs

    out[(12, 13, 1)] = rhs.edge_a - 2 * a1414

    rem = rhs.edge_b - 2 * a1414
    _require_even_slots(ctx, rem, "b")
    out[(13, 13, 1)] = rem >> 1

    out[(8, 8, 1)] = rhs.edge_j - out[(12, 13, 1)]
    out[(10, 10, 1)] = rhs.edge_c - out[(12, 13, 1)]
    out[(10, 11, 1)] = rhs.edge_d - 2 * out[(13, 13, 1)]

    rem = rhs.edge_e - out[(10, 11, 1)]
    _require_even_slots(ctx, rem, "e")
    out[(6, 7, 1)] = rem >> 1

    rem = rhs.edge_g - 2 * out[(6, 7, 1)]
    _require_even_slots(ctx, rem, "g")
    out[(9, 11, 1)] = rem >> 1

    out[(5, 5, 1)] = rhs.edge_f - out[(8, 8, 1)]
    out[(4, 5, 1)] = rhs.edge_i - out[(8, 8, 1)]

    residual = rhs.edge_h - 2 * out[(9, 11, 1)] - out[(12, 13, 1)]
    if residual.size and residual.any():
        x, y = _first_bad_slot(ctx, residual != 0)
        raise InconsistencyError(
            f"single-hop identity (h) residual {int(residual[residual != 0][0])} "
            f"at pair ({x}, {y})"
        )
    for key, values in out.items():
        _require_nonneg_slots(ctx, values, key)
    return out, int(np.abs(residual).max(initial=0))


def _slots_from_matrix(ctx: SweepContext, matrix: CountMatrix) -> np.ndarray:
    """Slot array of an edge-supported matrix (entries off the support are
    rejected)."""
    g = ctx.graph
    slots = np.zeros(g.indices.size, dtype=np.int64)
    t = matrix.transpose().to_csr()  # row r holds the entries stored in slots of row r
    t.sort_indices()
    for r in range(g.n):
        cols = t.indices[t.indptr[r] : t.indptr[r + 1]]
        vals = t.data[t.indptr[r] : t.indptr[r + 1]]
        keep = vals != 0
        cols, vals = cols[keep], vals[keep]
        if not cols.size:
            continue
        row = g.indices[g.indptr[r] : g.indptr[r + 1]]
        pos = np.searchsorted(row, cols)
        if (pos >= row.size).any() or not np.array_equal(row[pos], cols):
            raise InputError("matrix has entries off the edge support")
        slots[g.indptr[r] + pos] = vals
    return slots


def solve_single_hop(
    rhs: RhsAccumulators, a1414: CountMatrix
) -> tuple[dict[Key, CountMatrix], int]:
    """Solve the nine edge-supported matrices; returns them plus the residual
    of the leftover identity (always zero on healthy inputs)."""
    ctx = rhs.ctx
    slots, residual = _solve_single_slots(ctx, rhs, _slots_from_matrix(ctx, a1414))
    return {k: ctx.slot_matrix(v) for k, v in slots.items()}, residual


# ---------------------------------------------------------------------------
# double-hop system

# Each solver rewrites one raw far accumulator into its matrix in place,
# reading its already-solved inputs block by block (they may be disk-backed).


def _solve_far_triangle(arr, chord) -> None:
    """Raw triangle-far accumulator minus twice the chordal-opposite pairs."""
    for lo, hi in _blocked(arr.shape[0]):
        arr[lo:hi] -= 2 * np.asarray(chord[lo:hi], dtype=arr.dtype)
    _require_nonneg_dense(arr, f"solved matrix {format_key((9, 10, 2))}")


def _solve_far_shared(arr, chord) -> None:
    """Raw shared-end accumulator halved, minus the chordal-opposite pairs."""
    _require_even_dense(arr, "shared-ends")
    for lo, hi in _blocked(arr.shape[0]):
        arr[lo:hi] >>= 1
        arr[lo:hi] -= np.asarray(chord[lo:hi], dtype=arr.dtype)
    _require_nonneg_dense(arr, f"solved matrix {format_key((8, 8, 2))}")


def _solve_far_end(arr, a910) -> None:
    """Raw end-pair accumulator minus the solved triangle-far pairs."""
    for lo, hi in _blocked(arr.shape[0]):
        arr[lo:hi] -= np.asarray(a910[lo:hi], dtype=arr.dtype)
    _require_nonneg_dense(arr, f"solved matrix {format_key((6, 6, 2))}")


def _solve_far_centre(arr, a88) -> None:
    """Raw centre-far accumulator minus twice the solved opposite pairs."""
    for lo, hi in _blocked(arr.shape[0]):
        arr[lo:hi] -= 2 * np.asarray(a88[lo:hi], dtype=arr.dtype)
    _require_nonneg_dense(arr, f"solved matrix {format_key((4, 5, 2))}")


def solve_double_hop(
    rhs: RhsAccumulators, a1212: CountMatrix
) -> dict[Key, CountMatrix]:
    """Solve the four dense double-hop matrices from a full accumulator set."""
    needed = (rhs.far_triangle, rhs.far_shared, rhs.far_end_minus, rhs.far_centre)
    if any(a is None for a in needed):
        raise InputError("double-hop solve needs an unmasked accumulator sweep")
    a910 = np.asarray(rhs.far_triangle, dtype=np.int64).copy()
    a88 = np.asarray(rhs.far_shared, dtype=np.int64).copy()
    a66 = np.asarray(rhs.far_end_minus, dtype=np.int64).copy()
    a45 = np.asarray(rhs.far_centre, dtype=np.int64).copy()
    chord = a1212.to_dense() if a1212.is_dense else np.asarray(a1212.to_csr().todense())
    _solve_far_triangle(a910, chord)
    _solve_far_shared(a88, chord)
    _solve_far_end(a66, a910)
    _solve_far_centre(a45, a88)
    keep = rhs.ctx.graph.n <= DENSE_CAP
    return {
        (9, 10, 2): CountMatrix.from_dense(a910, keep_dense=keep),
        (8, 8, 2): CountMatrix.from_dense(a88, keep_dense=keep),
        (6, 6, 2): CountMatrix.from_dense(a66, keep_dense=keep),
        (4, 5, 2): CountMatrix.from_dense(a45, keep_dense=keep),
    }


# ---------------------------------------------------------------------------
# triple-hop system (adjacency cube)


def _adjacency_csr(g: Graph) -> sp.csr_matrix:
    return sp.csr_matrix(
        (np.ones(g.indices.size, dtype=np.int64), g.indices, g.indptr),
        shape=(g.n, g.n),
    )


def _square_dtype(n: int):
    return np.int64 if n <= DENSE_CAP else np.uint16


def _cube_dtype(n: int):
    # entries are bounded by (n-1)(n-2)
    return np.int64 if n <= DENSE_CAP or (n - 1) * (n - 2) >= 2**31 else np.int32


def _adjacency_square(g: Graph, threads: int, dtype) -> np.ndarray:
    """Full dense square of the adjacency matrix (diagonal = degrees)."""
    a2 = np.zeros((g.n, g.n), dtype=dtype)

    def run_one(lo, hi):
        kernels.impl.adj_square_rows(g.n, g.indptr, g.indices, lo, hi, a2[lo:hi])

    _run_shards(_shard_ranges(g.n, threads, 0), run_one)
    return a2


def _assemble_triple_hop(
    g: Graph,
    csr_terms: list[tuple[sp.csr_matrix, int]],
    dense_terms: list[tuple[np.ndarray, int]],
    out,
    threads: int,
    a2: np.ndarray | None = None,
) -> None:
    """out <- offdiag(A^3) minus all walk contributions, blocked by rows."""
    n = g.n
    if a2 is None:
        a2 = _adjacency_square(g, threads, _square_dtype(n))
    block = np.empty((min(_BLOCK_ROWS, n), n), dtype=np.int64) if n else None
    for lo, hi in _blocked(n):
        blk = block[: hi - lo]

        def run_one(rlo, rhi):
            kernels.impl.dense_matmul_rows(
                n, g.indptr, g.indices, a2, rlo, rhi, blk[rlo - lo : rhi - lo]
            )

        shards = [(s + lo, e + lo) for s, e in _shard_ranges(hi - lo, threads, 0)]
        _run_shards(shards, run_one)
        for csr, coeff in csr_terms:
            part = csr[lo:hi].tocoo()
            blk[part.row, part.col] -= coeff * part.data
        for arr, coeff in dense_terms:
            blk -= coeff * np.asarray(arr[lo:hi], dtype=np.int64)
        blk[np.arange(hi - lo), np.arange(lo, hi)] = 0
        neg = blk < 0
        if neg.any():
            r, c = np.argwhere(neg)[0]
            raise InconsistencyError(
                f"triple-hop matrix {format_key((4, 4, 3))} negative at pair "
                f"({int(r) + lo}, {int(c)})"
            )
        out[lo:hi] = blk


def _triple_hop_terms(get) -> tuple[list, list]:
    """Split the walk-coefficient table into CSR and dense subtraction terms.

    ``get(key)`` must return the CountMatrix for every key except the
    triple-hop output itself.
    """
    csr_terms: list[tuple[sp.csr_matrix, int]] = []
    dense_terms: list[tuple[np.ndarray, int]] = []
    for key, coeff in WALK3_COEFF.items():
        if key == (4, 4, 3):
            continue
        m = get(key)
        if key[2] == 1:
            csr_terms.append((m.to_csr(), coeff))
        else:
            if m.is_dense:
                dense_terms.append((m._dense, coeff))
            else:
                dense_terms.append((np.asarray(m.to_csr().todense()), coeff))
    return csr_terms, dense_terms


def compute_triple_hop(
    g: Graph | DegreeOrderedDag,
    known: "OrbitAdjacencySet | dict[Key, CountMatrix]",
    threads: int = 1,
) -> CountMatrix:
    """The orbit-4 to orbit-4 three-hop matrix from the adjacency cube minus
    every other walk contribution."""
    graph = g.graph if isinstance(g, DegreeOrderedDag) else g
    if graph.n > TRIPLE_HOP_NODE_CAP:
        raise ResourceCapError(
            f"adjacency cube refused for n={graph.n} (cap {TRIPLE_HOP_NODE_CAP})"
        )
    lookup = known.matrix if isinstance(known, OrbitAdjacencySet) else known.__getitem__
    csr_terms, dense_terms = _triple_hop_terms(lookup)
    out = np.zeros((graph.n, graph.n), dtype=_cube_dtype(graph.n))
    _assemble_triple_hop(graph, csr_terms, dense_terms, out, threads)
    return CountMatrix.from_dense(
        out.astype(np.int64, copy=False) if graph.n <= DENSE_CAP else out,
        keep_dense=True,
    )


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class _Plan:
    """Memory plan for one run: dtypes, spill directory, far-sweep split."""

    staged: bool
    workdir: str | None
    owns_workdir: bool
    far_groups: list[int]
    end_pair_dtype: type
    chord_dtype: type
    far_dtype: type

    def store(self, name: str, shape, dtype) -> np.ndarray:
        if not self.staged:
            return np.zeros(shape, dtype=dtype)
        path = os.path.join(self.workdir, f"{name}.npy")
        return open_memmap(path, mode="w+", dtype=dtype, shape=shape)

    def spill(self, name: str, arr: np.ndarray) -> np.ndarray:
        """Move a RAM array to the spill store (no-op when not staged)."""
        if not self.staged:
            return arr
        mm = self.store(name, arr.shape, arr.dtype)
        for lo, hi in _blocked(arr.shape[0]):
            mm[lo:hi] = arr[lo:hi]
        mm.flush()
        return mm


def _bitset_bytes(n: int) -> int:
    return n * ((n + 63) // 64) * 8


def _make_plan(g: Graph, workdir: str | None) -> _Plan:
    n, nnz = g.n, g.indices.size
    if n <= DENSE_CAP:
        return _Plan(
            staged=False,
            workdir=None,
            owns_workdir=False,
            far_groups=[_FAR_ALL],
            end_pair_dtype=np.int64,
            chord_dtype=np.int64,
            far_dtype=np.int64,
        )
    far_dtype = np.int32 if (n - 2) * (n - 2) < 2**31 else np.int64
    far_bytes = n * n * np.dtype(far_dtype).itemsize
    cell = n * n
    nnz8 = nnz * 8
    # standing allocation once the wedge context exists: adjacency bitset,
    # mirror + two per-slot count arrays, the dense path-end-pair table, and
    # the graph's own index arrays
    base = _bitset_bytes(n) + 3 * nnz8 + 2 * cell + nnz * 4
    budget = int(psutil.virtual_memory().available) - 500_000_000
    chord_peak = base + nnz8 + 4 * cell
    far_standing = base + 11 * nnz8  # + clique slots + ten edge accumulators
    if far_standing + 4 * far_bytes <= budget:
        far_groups = [_FAR_ALL]
        far_width = 4
    elif far_standing + 2 * far_bytes <= budget:
        far_groups = [_FAR_TRIANGLE | _FAR_SHARED, _FAR_END | _FAR_CENTRE]
        far_width = 2
    else:
        far_groups = [_FAR_TRIANGLE, _FAR_SHARED, _FAR_END, _FAR_CENTRE]
        far_width = 1
    single_peak = base - 2 * cell + 23 * nnz8  # path-end table spilled by then
    walk_peak = (
        _bitset_bytes(n) + 3 * nnz8 + 19 * nnz * 12 + 2 * cell
        + 3 * _BLOCK_ROWS * n * 8
    )
    peak = max(
        chord_peak, far_standing + far_width * far_bytes, single_peak, walk_peak
    )
    if peak > budget:
        raise ResourceCapError(
            f"estimated working set {peak / 1e9:.1f} GB exceeds the "
            f"{max(budget, 0) / 1e9:.1f} GB memory budget for n={n}"
        )
    owns = workdir is None
    if owns:
        workdir = tempfile.mkdtemp(prefix="orbitadj-")
    else:
        os.makedirs(workdir, exist_ok=True)
    return _Plan(
        staged=True,
        workdir=workdir,
        owns_workdir=owns,
        far_groups=far_groups,
        end_pair_dtype=np.uint16,
        chord_dtype=np.int32,
        far_dtype=far_dtype,
    )


def _transposed_dense(plan: _Plan, name: str, src: np.ndarray) -> np.ndarray:
    """Materialized transpose of a dense store (tiled when disk-backed)."""
    if not plan.staged:
        return np.ascontiguousarray(src.T)
    n = src.shape[0]
    dst = plan.store(name, src.shape, src.dtype)
    for ilo, ihi in _blocked(n):
        for jlo, jhi in _blocked(n):
            dst[jlo:jhi, ilo:ihi] = src[ilo:ihi, jlo:jhi].T
    dst.flush()
    return dst


def _wrap_dense(plan: _Plan, arr: np.ndarray) -> CountMatrix:
    if not plan.staged and arr.dtype != np.int64:
        arr = arr.astype(np.int64)
    return CountMatrix.from_dense(arr, keep_dense=True)


def compute_all(
    g: Graph | DegreeOrderedDag,
    threads: int = 1,
    workdir: str | None = None,
) -> tuple[OrbitAdjacencySet, SolveReport]:
    """Compute the complete 28-matrix set plus the solver self-check report."""
    graph = g.graph if isinstance(g, DegreeOrderedDag) else g
    if graph.n > TRIPLE_HOP_NODE_CAP:
        raise ResourceCapError(
            f"adjacency cube refused for n={graph.n} (cap {TRIPLE_HOP_NODE_CAP})"
        )
    plan = _make_plan(graph, workdir)
    report = SolveReport(
        implementation=kernels.implementation(),
        threads=threads,
        mode="staged" if plan.staged else "dense",
    )
    timer = _Timer(report.timings)
    t_start = time.perf_counter()

    ctx = SweepContext.build(graph)
    timer.lap("setup")

    three = count_three_node(graph, threads, ctx=ctx, end_pair_dtype=plan.end_pair_dtype)
    report.path_count = three.path_count
    report.triangle_count = three.triangle_count
    timer.lap("three_node")

    cc = count_chord_and_clique(graph, threads, ctx=ctx, chord_dtype=plan.chord_dtype)
    chord = plan.spill(format_key((12, 12, 2)), cc.chord_opposite)
    cc.chord_opposite = chord
    timer.lap("chord_clique")

    # far-pair (double-hop) accumulators, swept in as few passes as fit;
    # the triangle/shared sides are always solved before the end/centre
    # sides that consume them
    solved_far: dict[Key, np.ndarray] = {}
    edges: list[np.ndarray] | None = None
    rhs: RhsAccumulators | None = None
    for group in plan.far_groups:
        rhs = accumulate_rhs(
            graph, three, threads,
            eq4_mask=group, far_dtype=plan.far_dtype, edge_out=edges,
        )
        if edges is None:
            edges = [
                rhs.edge_a, rhs.edge_b, rhs.edge_c, rhs.edge_d, rhs.edge_e,
                rhs.edge_f, rhs.edge_g, rhs.edge_h, rhs.edge_i, rhs.edge_j,
            ]
        timer.lap("rhs")
        if group & _FAR_TRIANGLE:
            arr, rhs.far_triangle = rhs.far_triangle, None
            _solve_far_triangle(arr, chord)
            solved_far[(9, 10, 2)] = plan.spill(format_key((9, 10, 2)), arr)
        if group & _FAR_SHARED:
            arr, rhs.far_shared = rhs.far_shared, None
            _solve_far_shared(arr, chord)
            solved_far[(8, 8, 2)] = plan.spill(format_key((8, 8, 2)), arr)
        if group & _FAR_END:
            arr, rhs.far_end_minus = rhs.far_end_minus, None
            _solve_far_end(arr, solved_far[(9, 10, 2)])
            solved_far[(6, 6, 2)] = plan.spill(format_key((6, 6, 2)), arr)
        if group & _FAR_CENTRE:
            arr, rhs.far_centre = rhs.far_centre, None
            _solve_far_centre(arr, solved_far[(8, 8, 2)])
            solved_far[(4, 5, 2)] = plan.spill(format_key((4, 5, 2)), arr)
        arr = None
        timer.lap("solve_double")

    end_pair = plan.spill(format_key((1, 1, 2)), three.end_pair)
    three.end_pair = end_pair

    singles, residual = _solve_single_slots(ctx, rhs, cc.clique_pairs)
    report.consistency_residual = residual
    edges = None
    rhs = None
    timer.lap("solve_single")

    n = graph.n
    matrices: dict[Key, CountMatrix] = {}
    adjacency = _adjacency_csr(graph)
    if plan.staged:
        matrices[(0, 0, 1)] = CountMatrix(n, csr=adjacency)
    else:
        matrices[(0, 0, 1)] = CountMatrix.from_dense(
            np.asarray(adjacency.todense(), dtype=np.int64), keep_dense=True
        )
    matrices[(1, 2, 1)] = ctx.slot_matrix(three.end_to_centre)
    matrices[(2, 1, 1)] = ctx.slot_matrix(three.end_to_centre, transposed=True)
    matrices[(1, 1, 2)] = _wrap_dense(plan, end_pair)
    matrices[(3, 3, 1)] = ctx.slot_matrix(three.triangle_pairs)
    matrices[(14, 14, 1)] = ctx.slot_matrix(cc.clique_pairs)
    matrices[(12, 12, 2)] = _wrap_dense(plan, chord)
    for key, slots in singles.items():
        matrices[key] = ctx.slot_matrix(slots)
    matrices[(5, 4, 1)] = ctx.slot_matrix(singles[(4, 5, 1)], transposed=True)
    matrices[(7, 6, 1)] = ctx.slot_matrix(singles[(6, 7, 1)], transposed=True)
    matrices[(11, 9, 1)] = ctx.slot_matrix(singles[(9, 11, 1)], transposed=True)
    matrices[(11, 10, 1)] = ctx.slot_matrix(singles[(10, 11, 1)], transposed=True)
    matrices[(13, 12, 1)] = ctx.slot_matrix(singles[(12, 13, 1)], transposed=True)
    for key in _DOUBLE_HOP_KEYS:
        matrices[key] = _wrap_dense(plan, solved_far[key])
    matrices[(10, 9, 2)] = _wrap_dense(
        plan,
        _transposed_dense(plan, format_key((10, 9, 2)), solved_far[(9, 10, 2)]),
    )
    matrices[(5, 4, 2)] = _wrap_dense(
        plan,
        _transposed_dense(plan, format_key((5, 4, 2)), solved_far[(4, 5, 2)]),
    )
    timer.lap("assemble")

    csr_terms, dense_terms = _triple_hop_terms(lambda k: matrices[k])
    a44 = plan.store(format_key((4, 4, 3)), (n, n), _cube_dtype(n))
    _assemble_triple_hop(graph, csr_terms, dense_terms, a44, threads)
    matrices[(4, 4, 3)] = _wrap_dense(plan, a44)
    timer.lap("walks")

    report.timings["total"] = time.perf_counter() - t_start
    result = OrbitAdjacencySet(
        graph, matrices, workdir=plan.workdir, owns_workdir=plan.owns_workdir
    )
    return result, report
