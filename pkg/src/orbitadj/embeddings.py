"""Closed-form PMI matrices and truncated-SVD node embeddings.

Three pointwise-mutual-information constructions share one shape: the log of
an observed co-occurrence weight over the product of its row and column
masses, scaled by the total mass and shifted down by ``log(b)``:

* ``gopmi``     - any single role-pair count matrix as the co-occurrence;
* ``rwpmi``     - the p-th power of the adjacency matrix (p in 1..3);
* ``deepwalk_pmi`` - the length-averaged transition-matrix form
  ``vol(A) * (1/T sum_r (D^-1 A)^r) D^-1`` made famous by skip-gram
  factorisation analyses.

Entries where the underlying weight is zero are *absent* - tracked in a
mask, never materialised as ``log(0)``.  With ``b = 1``, ``gopmi`` on the
plain adjacency matrix, ``rwpmi`` with ``p = 1``, and ``deepwalk_pmi`` with
``T = 1`` are the same matrix; tests pin that chain to 1e-12.

``embed`` clips negative and absent entries to zero and factorises with a
deterministic subspace iteration (seeded start, 1e-10 singular-value
tolerance, 1000-iteration cap), returning left singular vectors scaled by
square-root singular values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .countmatrix import CountMatrix
from .errors import InputError
from .graph import DegreeOrderedDag, Graph

__all__ = [
    "PmiMatrix",
    "Embedding",
    "gopmi",
    "rwpmi",
    "deepwalk_pmi",
    "embed",
    "embedding_text",
    "SVD_SEED",
    "SVD_TOL",
    "SVD_MAX_ITER",
]

#: deterministic starting-subspace seed for the truncated SVD
SVD_SEED = 1729
#: convergence tolerance on the change of the singular-value estimates
SVD_TOL = 1e-10
#: iteration cap for the subspace method
SVD_MAX_ITER = 1000


@dataclass
class PmiMatrix:
    """Shifted PMI values plus the mask of entries that exist at all.

    ``values`` holds 0.0 at absent positions; ``present`` tells them apart
    from a genuine PMI of zero.
    """

    values: np.ndarray
    present: np.ndarray
    source: str

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def clipped(self) -> np.ndarray:
        """Non-negative dense matrix fed to the factorisation: absent and
        negative entries both become zero."""
        out = np.where(self.present, self.values, 0.0)
        np.maximum(out, 0.0, out=out)
        return out


@dataclass
class Embedding:
    """Rank-``dim`` factorisation of a clipped PMI matrix.

    ``vectors`` is the node embedding (left singular vectors scaled by
    square-root singular values); ``context`` is the matching right-hand
    factor so ``vectors @ context.T`` reconstructs the rank-``dim``
    approximation.
    """

    vectors: np.ndarray
    singular_values: np.ndarray
    context: np.ndarray

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def reconstruction(self) -> np.ndarray:
        return self.vectors @ self.context.T


def _shifted_log(num: np.ndarray, den: np.ndarray, b: float) -> np.ndarray:
    """log(num/den) - log(b) computed so the b-shift is an exact float
    subtraction (never folded into the ratio)."""
    return np.log(num / den) - math.log(b)


def _require_b(b: float) -> None:
    if not (b > 0):
        raise InputError(f"PMI shift b must be positive, got {b}")


def gopmi(base: CountMatrix, b: float = 1.0) -> PmiMatrix:
    """PMI of one role-pair count matrix.

    Entry (i, j) is ``log(vol * base[i,j] / (rowsum_i * colsum_j)) - log b``
    wherever ``base[i,j] > 0``; everything else (including whole zero
    rows/columns) is absent.
    """
    _require_b(b)
    vol = base.vol()
    if vol == 0:
        raise InputError("PMI needs a base matrix with at least one nonzero")
    n = base.n
    rows = base.row_sums().astype(np.float64)
    cols = base.col_sums().astype(np.float64)
    coo = base.to_csr().tocoo()
    values = np.zeros((n, n), dtype=np.float64)
    present = np.zeros((n, n), dtype=bool)
    keep = coo.data > 0
    i, j, v = coo.row[keep], coo.col[keep], coo.data[keep].astype(np.float64)
    values[i, j] = _shifted_log(float(vol) * v, rows[i] * cols[j], b)
    present[i, j] = True
    return PmiMatrix(values, present, f"gopmi(b={b:g})")


def _graph_of(g: Graph | DegreeOrderedDag) -> Graph:
    return g.graph if isinstance(g, DegreeOrderedDag) else g


def _dense_adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.float64)
    for r in range(g.n):
        a[r, g.indices[g.indptr[r] : g.indptr[r + 1]]] = 1.0
    return a


def rwpmi(g: Graph | DegreeOrderedDag, p: int = 1, b: float = 1.0) -> PmiMatrix:
    """PMI of the p-th adjacency power, p in 1..3.

    The power's own row sums weight both sides (it is symmetric), and its
    full support - diagonal included for p >= 2 - carries values.
    """
    _require_b(b)
    graph = _graph_of(g)
    if p not in (1, 2, 3):
        raise InputError(f"adjacency power must be 1, 2 or 3, got {p}")
    if graph.m == 0:
        raise InputError("PMI needs a graph with at least one edge")
    a = _dense_adjacency(graph)
    power = a
    for _ in range(p - 1):
        power = power @ a
    vol = power.sum()
    sums = power.sum(axis=1)
    present = power > 0
    i, j = np.nonzero(present)
    values = np.zeros_like(power)
    values[i, j] = _shifted_log(vol * power[i, j], sums[i] * sums[j], b)
    return PmiMatrix(values, present, f"rwpmi(p={p}, b={b:g})")


def deepwalk_pmi(g: Graph | DegreeOrderedDag, T: int = 1, b: float = 1.0) -> PmiMatrix:
    """PMI implicitly factorised by window-``T`` skip-gram walks:
    ``log(vol(A) * (1/T sum_{r=1}^T (D^-1 A)^r) D^-1) - log b``.

    Isolated nodes have no transitions, so their rows and columns are
    entirely absent.
    """
    _require_b(b)
    graph = _graph_of(g)
    if T < 1:
        raise InputError(f"walk-length cap must be >= 1, got {T}")
    if graph.m == 0:
        raise InputError("PMI needs a graph with at least one edge")
    n = graph.n
    a = _dense_adjacency(graph)
    deg = graph.degrees.astype(np.float64)
    inv_deg = np.divide(1.0, deg, out=np.zeros(n), where=deg > 0)
    trans = a * inv_deg[:, np.newaxis]
    acc = np.zeros((n, n), dtype=np.float64)
    step = np.eye(n)
    for _ in range(T):
        step = step @ trans
        acc += step
    weight = (2.0 * graph.m / T) * acc * inv_deg[np.newaxis, :]
    present = weight > 0
    i, j = np.nonzero(present)
    values = np.zeros_like(weight)
    values[i, j] = _shifted_log(weight[i, j], 1.0, b)
    return PmiMatrix(values, present, f"deepwalk(T={T}, b={b:g})")


# ---------------------------------------------------------------------------
# truncated SVD


def _truncated_svd(
    matrix: np.ndarray, d: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic rank-d SVD by subspace iteration on ``matrix @ matrix.T``.

    Returns (U, s, V) with columns ordered by non-increasing singular value;
    numerically zero singular values are dropped, so fewer than ``d`` columns
    can come back.  A few oversampling columns sharpen the leading values
    when neighbouring singular values are close; convergence is judged on
    the ``d`` values actually returned.
    """
    n_rows, n_cols = matrix.shape
    want = min(d, n_rows, n_cols)
    if want == 0 or not np.any(matrix):
        return (
            np.zeros((n_rows, 0)),
            np.zeros(0),
            np.zeros((n_cols, 0)),
        )
    k = min(want + 8, n_rows, n_cols)
    rng = np.random.default_rng(SVD_SEED)
    basis, _ = np.linalg.qr(rng.standard_normal((n_rows, k)))
    previous = None
    for _ in range(SVD_MAX_ITER):
        basis, _ = np.linalg.qr(matrix @ (matrix.T @ basis))
        projected = basis.T @ matrix
        u_small, s, vt = np.linalg.svd(projected, full_matrices=False)
        if previous is not None and np.abs(
            s[:want] - previous
        ).max() <= SVD_TOL * max(1.0, float(s[0])):
            break
        previous = s[:want]
    u = (basis @ u_small)[:, :want]
    s = s[:want]
    vt = vt[:want]
    keep = s > (s[0] * 1e-12 if s[0] > 0 else np.inf)
    return u[:, keep], s[keep], vt[keep].T


def embed(pmi: PmiMatrix, d: int) -> Embedding:
    """Rank-d factorisation of the clipped PMI matrix.

    Negative and absent entries are zeroed first.  When the clipped matrix
    has rank below ``d``, the embedding keeps only the rank-many meaningful
    columns and warns instead of padding with noise.
    """
    if d < 1:
        raise InputError(f"embedding dimension must be >= 1, got {d}")
    clipped = pmi.clipped()
    u, s, v = _truncated_svd(clipped, d)
    if s.size < min(d, pmi.n):
        warnings.warn(
            f"clipped PMI rank {s.size} is below the requested dimension {d}; "
            f"returning {s.size} columns",
            stacklevel=2,
        )
    scale = np.sqrt(s)
    return Embedding(
        vectors=u * scale[np.newaxis, :],
        singular_values=s,
        context=v * scale[np.newaxis, :],
    )


def embedding_text(graph: Graph, embedding: Embedding) -> str:
    """Serialize an embedding: ``label<TAB>v1<TAB>...<TAB>vd`` per node,
    17 significant digits."""
    if embedding.n != graph.n:
        raise InputError(
            f"embedding rows ({embedding.n}) do not match node count ({graph.n})"
        )
    lines = [
        "\t".join(
            [graph.labels[x], *(f"{v:.17g}" for v in embedding.vectors[x])]
        )
        for x in range(graph.n)
    ]
    return "\n".join(lines) + ("\n" if lines else "")
