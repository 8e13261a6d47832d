"""Simple undirected graphs: edge-list ingestion, CSR storage, degree ordering.

The graph container is deliberately minimal: dense integer ids 0..n-1, a CSR
neighbor structure with each row sorted ascending, and an optional label table
mapping ids back to the caller's node names.  Everything downstream (counting,
algebra, embeddings) treats instances as immutable.
"""

from __future__ import annotations

import io
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

__all__ = ["Graph", "DegreeOrderedDag", "parse_edge_list", "degree_order"]


class Graph:
    """Immutable undirected simple graph over ids 0..n-1.

    Attributes:
        n: node count.
        m: undirected edge count.
        indptr / indices: CSR neighbor lists, each row strictly increasing.
        labels: external node names, index = id. Defaults to decimal ids.
        parse_warnings: counts of dropped input lines when built by the
            parser, e.g. {"duplicate_edges": 1, "self_loops": 1}.
    """

    __slots__ = (
        "n",
        "m",
        "indptr",
        "indices",
        "labels",
        "parse_warnings",
        "_bitset",
        "_label_ids",
    )

    def __init__(
        self,
        n: int,
        edges: np.ndarray | Sequence[tuple[int, int]],
        labels: Sequence[str] | None = None,
        parse_warnings: dict[str, int] | None = None,
    ) -> None:
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise InputError(f"edge endpoint out of range for n={n}")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise InputError("self-loops are not allowed in a simple graph")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        canon = np.unique(lo * np.int64(n) + hi)
        if canon.size != edges.shape[0]:
            raise InputError("duplicate edges are not allowed in a simple graph")
        lo, hi = canon // n, canon % n

        self.n = int(n)
        self.m = int(lo.size)
        both_src = np.concatenate([lo, hi])
        both_dst = np.concatenate([hi, lo])
        order = np.lexsort((both_dst, both_src))
        self.indices = both_dst[order].astype(np.int32)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, both_src + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)

        if labels is not None:
            if len(labels) != n:
                raise InputError("label table length must equal node count")
            self.labels = tuple(str(x) for x in labels)
        else:
            self.labels = tuple(str(i) for i in range(n))
        self.parse_warnings = dict(parse_warnings or {})
        self._bitset: np.ndarray | None = None
        self._label_ids: dict[str, int] | None = None

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr).astype(np.int64)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        k = np.searchsorted(row, v)
        return bool(k < row.size and row[k] == v)

    def bitset(self) -> np.ndarray:
        """Packed adjacency rows (uint64 words), built lazily and cached."""
        if self._bitset is None:
            words = (self.n + 63) // 64
            bits = np.zeros((self.n, words), dtype=np.uint64)
            rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
            cols = self.indices.astype(np.int64)
            np.bitwise_or.at(
                bits, (rows, cols >> 6), np.uint64(1) << (cols & 63).astype(np.uint64)
            )
            self._bitset = bits
        return self._bitset

    def id_of(self, label: str) -> int:
        if self._label_ids is None:
            self._label_ids = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return self._label_ids[label]
        except KeyError:
            raise InputError(f"unknown node label: {label!r}") from None

    def edge_array(self) -> np.ndarray:
        """Canonical (m, 2) edge array: u < v, sorted lexicographically."""
        out = np.empty((self.m, 2), dtype=np.int64)
        k = 0
        for u in range(self.n):
            row = self.neighbors(u)
            above = row[row > u]
            out[k : k + above.size, 0] = u
            out[k : k + above.size, 1] = above
            k += above.size
        return out

    def to_edge_list_text(self) -> str:
        """Serialize to the canonical edge-list format (labels, sorted by id pair)."""
        buf = io.StringIO()
        buf.write(f"# nodes: {self.n}\n# edges: {self.m}\n")
        for u, v in self.edge_array():
            buf.write(f"{self.labels[u]}\t{self.labels[v]}\n")
        return buf.getvalue()

    def label_map_text(self) -> str:
        """Serialize the id -> label table, one `id<TAB>label` line per node."""
        return "".join(f"{i}\t{lab}\n" for i, lab in enumerate(self.labels))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Graph(n={self.n}, m={self.m})"


def parse_edge_list(source: str | bytes | Iterable[str]) -> Graph:
    """Parse edge-list text: one edge per line, two whitespace-separated labels.

    Lines starting with '#' and blank lines are ignored.  Labels are assigned
    ids 0..n-1 in first-appearance order.  Self-loops and duplicate edges are
    dropped, with counts surfaced in ``Graph.parse_warnings``.

    Raises:
        InputError: on a line with a token count other than 2, or when no
            edges remain after cleaning.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        lines: Iterable[str] = source.splitlines()
    else:
        lines = source

    ids: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    dup = loops = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(
                f"line {lineno}: expected 2 whitespace-separated labels, got {len(parts)}"
            )
        a = ids.setdefault(parts[0], len(ids))
        b = ids.setdefault(parts[1], len(ids))
        if a == b:
            loops += 1
            continue
        key = (a, b) if a < b else (b, a)
        if key in seen:
            dup += 1
            continue
        seen.add(key)
        edges.append(key)
    if not edges:
        raise InputError("no edges remain after cleaning; refusing to build an empty graph")

    labels = [""] * len(ids)
    for lab, i in ids.items():
        labels[i] = lab
    warnings = {}
    if dup:
        warnings["duplicate_edges"] = dup
    if loops:
        warnings["self_loops"] = loops
    return Graph(len(ids), edges, labels=labels, parse_warnings=warnings)


class DegreeOrderedDag:
    """Acyclic orientation of a graph along the (degree, id) total order.

    Each undirected edge is directed from its smaller endpoint to its larger
    endpoint under the order "lower degree first, ties broken by lower id".
    ``rank[u]`` gives u's position in that order; comparing ranks compares
    nodes.  Out- and in-neighbor lists are CSR rows sorted by neighbor id.
    """

    __slots__ = (
        "graph",
        "order",
        "rank",
        "out_indptr",
        "out_indices",
        "in_indptr",
        "in_indices",
        "max_out_degree",
    )

    def __init__(self, graph: Graph) -> None:
        self.graph = graph
        n = graph.n
        deg = graph.degrees
        self.order = np.lexsort((np.arange(n), deg)).astype(np.int32)
        self.rank = np.empty(n, dtype=np.int32)
        self.rank[self.order] = np.arange(n, dtype=np.int32)

        rows = np.repeat(np.arange(n, dtype=np.int32), np.diff(graph.indptr))
        cols = graph.indices
        fwd = self.rank[rows] < self.rank[cols]
        self.out_indptr, self.out_indices = _csr_from_pairs(n, rows[fwd], cols[fwd])
        self.in_indptr, self.in_indices = _csr_from_pairs(n, rows[~fwd], cols[~fwd])
        out_deg = np.diff(self.out_indptr)
        self.max_out_degree = int(out_deg.max()) if n else 0

    def out_neighbors(self, u: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[u] : self.out_indptr[u + 1]]

    def in_neighbors(self, u: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[u] : self.in_indptr[u + 1]]


def _csr_from_pairs(n: int, rows: np.ndarray, cols: np.ndarray):
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows.astype(np.int64) + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, cols.astype(np.int32)


def degree_order(graph: Graph) -> DegreeOrderedDag:
    """Orient ``graph`` along the (degree, id) order; see DegreeOrderedDag."""
    return DegreeOrderedDag(graph)
