"""Square integer pair-count matrices with exact (never floating) arithmetic.

A CountMatrix is an n×n matrix of signed 64-bit counts with a structurally
zero diagonal.  Storage is either a scipy CSR matrix (the canonical frozen
form) or a dense integer ndarray; dense layout is the default for n <= 2048
and is also used internally for disk-backed arrays at large n.  Subtraction
chains may pass through negative intermediates; ``assert_nonnegative`` is the
finalize gate.

Matrix products are exact: an a-priori bound on the largest possible entry is
checked before multiplying, and the operation fails hard instead of wrapping.
"""

from __future__ import annotations

import io
from typing import IO, Iterator

import numpy as np
import scipy.sparse as sp

from .errors import InconsistencyError, InputError
from .graphlets import Key, format_key, parse_key

__all__ = ["CountMatrix", "DENSE_CAP", "write_triplets", "read_triplets"]

#: largest n for which freshly built matrices default to dense layout
DENSE_CAP = 2048

_I64_MAX = np.iinfo(np.int64).max


class CountMatrix:
    """Immutable-by-convention integer count matrix with zero diagonal."""

    __slots__ = ("n", "_dense", "_csr")

    def __init__(self, n: int, dense: np.ndarray | None = None, csr: sp.csr_matrix | None = None):
        if (dense is None) == (csr is None):
            raise ValueError("exactly one backing store required")
        self.n = int(n)
        self._dense = dense
        self._csr = csr

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, n: int) -> "CountMatrix":
        if n <= DENSE_CAP:
            return cls(n, dense=np.zeros((n, n), dtype=np.int64))
        return cls(n, csr=sp.csr_matrix((n, n), dtype=np.int64))

    @classmethod
    def from_dense(cls, arr: np.ndarray, *, keep_dense: bool | None = None) -> "CountMatrix":
        """Wrap a square integer array; the diagonal must already be zero."""
        arr = np.asarray(arr)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InputError("count matrix must be square")
        if not np.issubdtype(arr.dtype, np.integer):
            raise InputError("count matrix entries must be integers")
        n = arr.shape[0]
        if np.count_nonzero(arr.diagonal()):
            raise InconsistencyError("count matrix diagonal must be zero")
        if keep_dense is None:
            keep_dense = n <= DENSE_CAP
        if keep_dense:
            return cls(n, dense=arr)
        return cls(n, csr=sp.csr_matrix(arr, dtype=np.int64))

    @classmethod
    def from_coo(cls, n: int, rows, cols, vals) -> "CountMatrix":
        """Build from triplets; duplicate coordinates are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.int64)
        if rows.size and (rows.min() < 0 or rows.max() >= n or cols.min() < 0 or cols.max() >= n):
            raise InputError("triplet coordinate out of range")
        if np.any(rows == cols):
            raise InconsistencyError("count matrix diagonal must be zero")
        m = sp.coo_matrix((vals, (rows, cols)), shape=(n, n), dtype=np.int64).tocsr()
        m.sum_duplicates()
        if n <= DENSE_CAP:
            return cls(n, dense=np.asarray(m.todense(), dtype=np.int64))
        return cls(n, csr=m)

    # -- views and scalars -------------------------------------------------

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def to_dense(self) -> np.ndarray:
        if self._dense is not None:
            return np.asarray(self._dense, dtype=np.int64)
        return np.asarray(self._csr.todense(), dtype=np.int64)

    def to_csr(self) -> sp.csr_matrix:
        if self._csr is not None:
            return self._csr
        c = sp.csr_matrix(np.asarray(self._dense, dtype=np.int64))
        c.eliminate_zeros()
        return c

    def entry(self, u: int, v: int) -> int:
        if self._dense is not None:
            return int(self._dense[u, v])
        return int(self._csr[u, v])

    @property
    def nnz(self) -> int:
        if self._dense is not None:
            return int(np.count_nonzero(self._dense))
        self._csr.eliminate_zeros()
        return int(self._csr.nnz)

    def vol(self) -> int:
        """Sum of all entries."""
        if self._dense is not None:
            return int(self._dense.sum(dtype=np.int64))
        return int(self._csr.sum(dtype=np.int64))

    def max_abs(self) -> int:
        if self._dense is not None:
            if self.n == 0:
                return 0
            return int(max(int(self._dense.max()), -int(self._dense.min())))
        if self._csr.nnz == 0:
            return 0
        return int(np.abs(self._csr.data).max())

    def negative_count(self) -> int:
        if self._dense is not None:
            total = 0
            for lo in range(0, self.n, 4096):
                block = np.asarray(self._dense[lo : lo + 4096])
                total += int(np.count_nonzero(block < 0))
            return total
        return int((self._csr.data < 0).sum())

    def assert_nonnegative(self, context: str) -> None:
        neg = self.negative_count()
        if neg:
            raise InconsistencyError(f"{context}: {neg} negative entries after finalize")

    # -- algebra -----------------------------------------------------------

    def add(self, other: "CountMatrix", coeff: int = 1) -> "CountMatrix":
        """Element-wise self + coeff*other; the diagonal stays zero."""
        if other.n != self.n:
            raise InputError("dimension mismatch in matrix addition")
        if self.is_dense and other.is_dense:
            out = self.to_dense() + coeff * other.to_dense()
            return CountMatrix(self.n, dense=out)
        out = (self.to_csr() + coeff * other.to_csr()).tocsr()
        out.eliminate_zeros()
        return CountMatrix(self.n, csr=out)

    def transpose(self) -> "CountMatrix":
        if self._dense is not None:
            return CountMatrix(self.n, dense=np.ascontiguousarray(self.to_dense().T))
        return CountMatrix(self.n, csr=self._csr.transpose().tocsr())

    def row_sums(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense.sum(axis=1, dtype=np.int64)
        return np.asarray(self._csr.sum(axis=1, dtype=np.int64)).ravel()

    def col_sums(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense.sum(axis=0, dtype=np.int64)
        return np.asarray(self._csr.sum(axis=0, dtype=np.int64)).ravel()

    def matmul(self, other: "CountMatrix | np.ndarray | sp.spmatrix") -> tuple["CountMatrix", np.ndarray]:
        """Exact integer product; off-diagonal part plus the diagonal vector.

        The diagonal is returned out-of-band because count matrices keep a
        structurally zero diagonal while walk matrices need theirs (the square
        of an adjacency matrix carries degrees on the diagonal).
        """
        a = self.to_csr()
        if isinstance(other, CountMatrix):
            b = other.to_csr()
        elif isinstance(other, np.ndarray):
            b = sp.csr_matrix(np.asarray(other, dtype=np.int64))
        else:
            b = other.tocsr().astype(np.int64)
        if b.shape != (self.n, self.n):
            raise InputError("dimension mismatch in matrix product")
        _check_product_bound(a, b)
        prod = (a @ b).tocsr()
        diag = np.asarray(prod.diagonal(), dtype=np.int64)
        prod.setdiag(0)
        prod.eliminate_zeros()
        if self.n <= DENSE_CAP:
            off = CountMatrix(self.n, dense=np.asarray(prod.todense(), dtype=np.int64))
        else:
            off = CountMatrix(self.n, csr=prod)
        return off, diag

    # -- comparisons and symmetry -----------------------------------------

    def equals(self, other: "CountMatrix") -> bool:
        if self.n != other.n:
            return False
        if self.is_dense and other.is_dense:
            for lo in range(0, self.n, 4096):
                a = np.asarray(self._dense[lo : lo + 4096])
                b = np.asarray(other._dense[lo : lo + 4096])
                if not np.array_equal(a, b):
                    return False
            return True
        diff = self.to_csr() - other.to_csr()
        return diff.nnz == 0 or not np.any(diff.data)

    def is_symmetric(self) -> bool:
        return self.equals(self.transpose())

    def first_difference(self, other: "CountMatrix") -> tuple[int, int, int, int] | None:
        """First (row, col, self_value, other_value) where the two disagree."""
        diff = (self.to_csr() - other.to_csr()).tocoo()
        mask = diff.data != 0
        if not mask.any():
            return None
        rows, cols = diff.row[mask], diff.col[mask]
        order = np.lexsort((cols, rows))
        r, c = int(rows[order[0]]), int(cols[order[0]])
        return r, c, self.entry(r, c), other.entry(r, c)

    # -- iteration ---------------------------------------------------------

    def iter_triplets(self) -> Iterator[tuple[int, int, int]]:
        """Nonzero (row, col, value) triplets in (row, col) order.

        The dense path walks one row at a time so disk-backed matrices never
        materialize a second full copy.
        """
        if self._dense is not None:
            d = self._dense
            for r in range(self.n):
                row = np.asarray(d[r])
                for c in np.flatnonzero(row):
                    yield r, int(c), int(row[c])
            return
        c = self.to_csr()
        c.sort_indices()
        indptr, indices, data = c.indptr, c.indices, c.data
        for r in range(self.n):
            for k in range(indptr[r], indptr[r + 1]):
                if data[k]:
                    yield r, int(indices[k]), int(data[k])


def _check_product_bound(a: sp.csr_matrix, b: sp.csr_matrix) -> None:
    """Refuse products whose entries could exceed signed 64-bit range."""
    if a.nnz == 0 or b.nnz == 0:
        return
    max_a = int(np.abs(a.data).max())
    max_b = int(np.abs(b.data).max())
    row_mass_a = int(np.abs(a).sum(axis=1).max())
    col_mass_b = int(np.abs(b).sum(axis=0).max())
    bound = min(row_mass_a * max_b, col_mass_b * max_a)
    if bound > _I64_MAX:
        raise InconsistencyError(
            f"matrix product could overflow 64-bit counts (entry bound {bound})"
        )


# -- triplet serialization ---------------------------------------------------


def write_triplets(fh: IO[str], matrix: CountMatrix, key: Key) -> None:
    """Write the canonical triplet format for one keyed matrix.

    Header lines carry the dimension and the key; data lines are
    ``row<TAB>col<TAB>count`` over internal ids, sorted by (row, col).
    """
    i, j, h = key
    fh.write(f"# n: {matrix.n}\n")
    fh.write(f"# key: o{i}-o{j} hops={h}\n")
    buf: list[str] = []
    for r, c, v in matrix.iter_triplets():
        buf.append(f"{r}\t{c}\t{v}\n")
        if len(buf) >= 65536:
            fh.write("".join(buf))
            buf.clear()
    fh.write("".join(buf))


def triplet_text(matrix: CountMatrix, key: Key) -> str:
    out = io.StringIO()
    write_triplets(out, matrix, key)
    return out.getvalue()


def read_triplets(fh: IO[str] | str) -> tuple[CountMatrix, Key]:
    """Parse the triplet format back into a (CountMatrix, key) pair."""
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    n = None
    key: Key | None = None
    rows: list[int] = []
    cols: list[int] = []
    vals: list[int] = []
    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n:"):
                n = int(body[2:].strip())
            elif body.startswith("key:"):
                spec = body[4:].strip()
                pair, _, hops = spec.partition(" hops=")
                a, _, b = pair.partition("-")
                key = parse_key(f"{a}-{b}-h{int(hops)}")
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise InputError(f"triplet line {lineno}: expected 3 tab-separated fields")
        rows.append(int(parts[0]))
        cols.append(int(parts[1]))
        vals.append(int(parts[2]))
    if n is None or key is None:
        raise InputError("triplet input missing '# n:' or '# key:' header")
    return CountMatrix.from_coo(n, rows, cols, vals), key


def triplet_filename(key: Key) -> str:
    """Canonical per-key output filename, e.g. ``o4-o4-h3.tsv``."""
    return f"{format_key(key)}.tsv"
