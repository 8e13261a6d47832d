"""Seeded random-graph generators for the benchmark harness.

Two families, both emitting simple graphs with an exact edge count and
bit-identical output for identical parameters:

* ``ER`` - uniform: the edge set is drawn uniformly among all sets of
  exactly ``m`` node pairs.
* ``BA`` - preferential attachment: nodes arrive one at a time and attach
  to ``round(m / n)`` existing nodes sampled from a repeated-node list
  (one entry per incident edge), duplicates resampled.  Growth alone
  rarely lands on ``m`` exactly, so remaining edges are drawn with the
  same preferential rule between existing nodes until the count is exact.

The BA degree distribution is fat-tailed: its maximum degree beats a
same-size uniform graph's in nearly every seed pairing, which the test
suite checks empirically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph import Graph

__all__ = ["GenSpec", "MODELS", "generate"]

MODELS = ("ER", "BA")

#: consecutive rejected preferential draws before switching to the
#: deterministic fill of the densest missing pairs (only reachable on
#: nearly complete graphs)
_STALL_LIMIT = 10_000


@dataclass(frozen=True)
class GenSpec:
    """One generator request: model, size, exact edge target, seed."""

    model: str
    n: int
    m: int
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", str(self.model).upper())
        if self.model not in MODELS:
            raise InputError(
                f"unknown model {self.model!r}; expected one of {MODELS}"
            )
        if self.n < 1:
            raise InputError(f"node count must be >= 1, got {self.n}")
        if self.m < 0:
            raise InputError(f"edge count must be >= 0, got {self.m}")
        if not 0 <= self.seed < 2**64:
            raise InputError(f"seed must fit in 64 bits, got {self.seed}")
        limit = self.n * (self.n - 1) // 2
        if self.m > limit:
            raise InputError(
                f"cannot place {self.m} edges on {self.n} nodes "
                f"(at most {limit})"
            )
        if self.model == "BA" and self.attachment < 1:
            raise InputError(
                f"preferential attachment needs round(m/n) >= 1, "
                f"got m={self.m}, n={self.n}"
            )

    @property
    def attachment(self) -> int:
        """Edges each arriving node tries to add in the BA model."""
        return round(self.m / self.n)


def _pairs_of_indices(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Invert the triangular enumeration idx = v(v-1)/2 + u with u < v."""
    v = ((1.0 + np.sqrt(1.0 + 8.0 * idx.astype(np.float64))) / 2.0).astype(
        np.int64
    )
    # float sqrt can land one off on either side of the triangular boundary
    v -= v * (v - 1) // 2 > idx
    v += (v + 1) * v // 2 <= idx
    u = idx - v * (v - 1) // 2
    return u, v


def _generate_er(n: int, m: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    total = n * (n - 1) // 2
    if m == total:
        return [(u, v) for v in range(n) for u in range(v)]
    chosen = np.empty(0, dtype=np.int64)
    while chosen.size < m:
        batch = max(16, int(1.2 * (m - chosen.size)))
        fresh = rng.integers(0, total, size=batch, dtype=np.int64)
        chosen = np.unique(np.concatenate([chosen, fresh]))
    if chosen.size > m:
        # drop a uniformly random part of the overshoot to stay uniform
        chosen = chosen[rng.permutation(chosen.size)[:m]]
    u, v = _pairs_of_indices(chosen)
    return list(zip(u.tolist(), v.tolist()))


def _fill_densest_missing(
    n: int,
    need: int,
    degree: list[int],
    seen: set[int],
) -> list[tuple[int, int]]:
    """Deterministic completion for nearly full graphs: the missing pairs
    with the largest degree products, ties broken by node ids."""
    missing = [
        (u, v)
        for v in range(n)
        for u in range(v)
        if u * n + v not in seen
    ]
    missing.sort(key=lambda p: (-degree[p[0]] * degree[p[1]], p))
    return missing[:need]


def _generate_ba(
    n: int, m: int, k: int, rng: np.random.Generator
) -> list[tuple[int, int]]:
    edges: list[tuple[int, int]] = []
    seen: set[int] = set()
    degree = [0] * n
    targets: list[int] = []

    def add(u: int, v: int) -> None:
        lo, hi = (u, v) if u < v else (v, u)
        edges.append((lo, hi))
        seen.add(lo * n + hi)
        degree[u] += 1
        degree[v] += 1
        targets.append(u)
        targets.append(v)

    for i in range(1, n):
        want = min(k, i, m - len(edges))
        if i == 1:
            # the sole existing node needs no preferential draw
            picked = [0] if want else []
        else:
            picked = []
            taken: set[int] = set()
            while len(picked) < want:
                t = targets[int(rng.integers(0, len(targets)))]
                if t not in taken:
                    taken.add(t)
                    picked.append(t)
        for t in picked:
            add(t, i)

    stall = 0
    while len(edges) < m:
        u = targets[int(rng.integers(0, len(targets)))]
        v = targets[int(rng.integers(0, len(targets)))]
        lo, hi = (u, v) if u < v else (v, u)
        if u == v or lo * n + hi in seen:
            stall += 1
            if stall > _STALL_LIMIT:
                for pu, pv in _fill_densest_missing(
                    n, m - len(edges), degree, seen
                ):
                    add(pu, pv)
            continue
        add(u, v)
        stall = 0
    return edges


def generate(spec: GenSpec) -> Graph:
    """Build the graph a spec describes; identical specs give identical
    graphs."""
    rng = np.random.default_rng(spec.seed)
    if spec.model == "ER":
        edges = _generate_er(spec.n, spec.m, rng)
    else:
        edges = _generate_ba(spec.n, spec.m, spec.attachment, rng)
    return Graph(spec.n, edges)
