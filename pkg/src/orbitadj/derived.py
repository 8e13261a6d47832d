"""Per-node orbit counts, per-graphlet adjacency, and walk decompositions.

Everything in this module is a pure read of a complete
:class:`~orbitadj.solver.OrbitAdjacencySet`:

* ``gdv`` turns row sums of the role-pair matrices into the 15-orbit count
  vector of every node, dividing by the partner multiplicity of the key used
  and cross-checking every alternative key that contains the same orbit.
* ``graphlet_adjacency`` sums all ordered keys of one graphlet into that
  graphlet's co-occurrence matrix.
* ``rw_decompose`` re-expresses the off-diagonal of a small power of the
  adjacency matrix as an integer combination of role-pair matrices and
  reports the residual (zero on healthy inputs) together with each term's
  mass, so a failure names the key that drifted.

The partner-multiplicity table itself lives in :mod:`orbitadj.graphlets`,
derived from the 4-node templates rather than copied from anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .countmatrix import DENSE_CAP, CountMatrix
from .errors import InconsistencyError, InputError
from .graph import DegreeOrderedDag, Graph
from .graphlets import (
    GDV_ROUTES,
    MULTIPLICITY,
    ORBIT_COUNT,
    ORBIT_GRAPHLET,
    ORDERED_KEYS,
    RW3_SEEN,
    WALK2_COEFF,
    WALK3_COEFF,
    Key,
    format_key,
)
from .solver import OrbitAdjacencySet, _adjacency_square, _blocked, _square_dtype

__all__ = [
    "KEYS_OF_GRAPHLET",
    "RwDecompositionReport",
    "gdv",
    "gdv_text",
    "graphlet_adjacency",
    "rw_decompose",
]

#: graphlet index -> every ordered key realised inside that graphlet
KEYS_OF_GRAPHLET: dict[int, tuple[Key, ...]] = {
    g: tuple(key for key in ORDERED_KEYS if ORBIT_GRAPHLET[key[0]] == g)
    for g in range(9)
}


# ---------------------------------------------------------------------------
# graphlet degree vectors


def _orbit_counts_via(matrix_set: OrbitAdjacencySet, key: Key) -> np.ndarray:
    """Per-node occurrence count of orbit ``key[0]`` read through one key."""
    sums = matrix_set.matrix(key).row_sums()
    c = MULTIPLICITY[key]
    if c > 1:
        rem = sums % c
        if rem.any():
            node = int(np.flatnonzero(rem)[0])
            raise InconsistencyError(
                f"row sum of {format_key(key)} at node {node} is "
                f"{int(sums[node])}, not divisible by partner multiplicity {c}"
            )
        sums //= c
    return sums


def gdv(matrix_set: OrbitAdjacencySet) -> np.ndarray:
    """(n, 15) array of per-node orbit occurrence counts.

    Each orbit is computed from one designated key and re-derived through
    every other key containing that orbit; any disagreement raises, because
    it means the solved matrices are mutually inconsistent.
    """
    out = np.zeros((matrix_set.n, ORBIT_COUNT), dtype=np.int64)
    for orbit, routes in GDV_ROUTES.items():
        counts = _orbit_counts_via(matrix_set, routes[0])
        for alt in routes[1:]:
            alt_counts = _orbit_counts_via(matrix_set, alt)
            if not np.array_equal(counts, alt_counts):
                node = int(np.flatnonzero(counts != alt_counts)[0])
                raise InconsistencyError(
                    f"orbit {orbit} count mismatch at node {node}: "
                    f"{format_key(routes[0])} gives {int(counts[node])} but "
                    f"{format_key(alt)} gives {int(alt_counts[node])}"
                )
        out[:, orbit] = counts
    return out


def gdv_text(graph: Graph, vectors: np.ndarray) -> str:
    """Serialize per-node orbit counts: ``label<TAB>o0<TAB>...<TAB>o14``."""
    if vectors.shape != (graph.n, ORBIT_COUNT):
        raise InputError(
            f"expected a ({graph.n}, {ORBIT_COUNT}) count table, "
            f"got {vectors.shape}"
        )
    lines = [
        "\t".join([graph.labels[x], *(str(int(v)) for v in vectors[x])])
        for x in range(graph.n)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# graphlet adjacency


def graphlet_adjacency(matrix_set: OrbitAdjacencySet, graphlet: int) -> CountMatrix:
    """Co-occurrence matrix of one graphlet: the sum of all its ordered keys."""
    if graphlet not in KEYS_OF_GRAPHLET:
        raise InputError(f"graphlet index must be 0..8, got {graphlet}")
    total = CountMatrix.zeros(matrix_set.n)
    for key in KEYS_OF_GRAPHLET[graphlet]:
        total = total.add(matrix_set.matrix(key))
    return total


# ---------------------------------------------------------------------------
# random-walk decomposition


@dataclass
class RwDecompositionReport:
    """Outcome of re-expressing offdiag(A^length) in role-pair matrices."""

    length: int
    residual: CountMatrix
    masses: dict[Key, int]
    seen: dict[Key, bool] = field(repr=False)
    walk_count: int
    diagonal_matches_degrees: bool | None = None

    @property
    def residual_is_zero(self) -> bool:
        return self.residual.nnz == 0


def rw_decompose(
    g: Graph | DegreeOrderedDag,
    matrix_set: OrbitAdjacencySet,
    length: int,
    threads: int = 1,
) -> RwDecompositionReport:
    """Check offdiag(A^length) against its role-pair decomposition.

    ``length`` must be 2 or 3.  The residual matrix (walk counts minus all
    decomposition terms) is returned rather than raised on, along with each
    term's total mass and, for ``length == 2``, whether the diagonal of the
    square equals the degree sequence.
    """
    graph = g.graph if isinstance(g, DegreeOrderedDag) else g
    if length not in (2, 3):
        raise InputError(f"walk length must be 2 or 3, got {length}")
    if graph.n != matrix_set.n:
        raise InputError("graph and matrix set disagree on node count")
    table = WALK2_COEFF if length == 2 else WALK3_COEFF

    csr_terms = []
    dense_terms = []
    for key, coeff in table.items():
        m = matrix_set.matrix(key)
        if key[2] == 1:
            csr_terms.append((m.to_csr(), coeff))
        elif m.is_dense:
            dense_terms.append((m._dense, coeff))
        else:
            dense_terms.append((np.asarray(m.to_csr().todense()), coeff))

    n = graph.n
    a2 = _adjacency_square(graph, threads, _square_dtype(n))
    degrees = np.diff(graph.indptr)
    diag_ok: bool | None = (
        bool(np.array_equal(np.diagonal(a2), degrees)) if length == 2 else None
    )

    from . import kernels  # late import keeps the jit/numpy switch honoured

    walk_count = 0
    res_rows: list[np.ndarray] = []
    res_cols: list[np.ndarray] = []
    res_vals: list[np.ndarray] = []
    for lo, hi in _blocked(n):
        if length == 2:
            blk = np.asarray(a2[lo:hi], dtype=np.int64).copy()
        else:
            blk = np.zeros((hi - lo, n), dtype=np.int64)
            kernels.impl.dense_matmul_rows(
                n, graph.indptr, graph.indices, a2, lo, hi, blk
            )
        blk[np.arange(hi - lo), np.arange(lo, hi)] = 0
        walk_count += int(blk.sum(dtype=np.int64))
        for csr, coeff in csr_terms:
            part = csr[lo:hi].tocoo()
            blk[part.row, part.col] -= coeff * part.data
        for arr, coeff in dense_terms:
            blk -= coeff * np.asarray(arr[lo:hi], dtype=np.int64)
        nz = np.argwhere(blk != 0)
        if nz.size:
            res_rows.append(nz[:, 0] + lo)
            res_cols.append(nz[:, 1])
            res_vals.append(blk[nz[:, 0], nz[:, 1]])

    if res_rows:
        residual = CountMatrix.from_coo(
            n,
            np.concatenate(res_rows),
            np.concatenate(res_cols),
            np.concatenate(res_vals),
        )
    else:
        residual = CountMatrix.zeros(n)
    masses = {key: coeff * matrix_set.matrix(key).vol() for key, coeff in table.items()}
    seen = {key: key in RW3_SEEN for key in ORDERED_KEYS}
    return RwDecompositionReport(
        length=length,
        residual=residual,
        masses=masses,
        seen=seen,
        walk_count=walk_count,
        diagonal_matches_degrees=diag_ok,
    )
