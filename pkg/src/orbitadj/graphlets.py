"""Connected 2-4 node subgraph templates and their symmetry orbits.

This module is the single source of truth for the small-subgraph taxonomy the
rest of the package is built on:

* the nine connected graphlets on 2..4 nodes (single edge, 3-path, triangle,
  4-path, claw, 4-cycle, paw, diamond, 4-clique), numbered 0..8 in that order;
* the fifteen automorphism orbits 0..14 of their nodes (two template nodes
  share an orbit exactly when some automorphism maps one to the other, which
  for these graphs coincides with having equal degree inside the template);
* the role-pair keys ``(i, j, h)`` that index co-occurrence matrices: orbit of
  the source node, orbit of the target node, and their hop distance measured
  inside the template.

Everything derivable -- which ordered keys exist, how many target-role nodes a
fixed source-role node sees (``MULTIPLICITY``), and which keys a 2-step or
3-step walk can reach (``WALK2_COEFF`` / ``WALK3_COEFF``) -- is computed from
the templates at import time rather than hand-entered, so a single edit to a
template cannot silently disagree with the derived tables.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

__all__ = [
    "GraphletTemplate",
    "TEMPLATES",
    "ORBIT_COUNT",
    "ORBIT_GRAPHLET",
    "ORBIT_DEGREE",
    "ORDERED_KEYS",
    "CANONICAL_KEYS",
    "TRANSPOSED_KEYS",
    "MULTIPLICITY",
    "WALK2_COEFF",
    "WALK3_COEFF",
    "RW3_SEEN",
    "GDV_ROUTES",
    "canonical_form",
    "format_key",
    "parse_key",
]

Key = tuple[int, int, int]


@dataclass(frozen=True)
class GraphletTemplate:
    """One connected template graph on 2..4 nodes with per-node orbit labels."""

    index: int
    name: str
    n: int
    edges: tuple[tuple[int, int], ...]
    orbits: tuple[int, ...]
    dist: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self) -> None:
        adj = [[False] * self.n for _ in range(self.n)]
        for u, v in self.edges:
            adj[u][v] = adj[v][u] = True
        # BFS all-pairs; templates are tiny so this is instant.
        dist = []
        for s in range(self.n):
            d = [-1] * self.n
            d[s] = 0
            frontier = [s]
            while frontier:
                nxt = []
                for x in frontier:
                    for y in range(self.n):
                        if adj[x][y] and d[y] < 0:
                            d[y] = d[x] + 1
                            nxt.append(y)
                frontier = nxt
            dist.append(tuple(d))
        object.__setattr__(self, "dist", tuple(dist))

    def degree(self, node: int) -> int:
        return sum(1 for e in self.edges if node in e)


TEMPLATES: tuple[GraphletTemplate, ...] = (
    GraphletTemplate(0, "edge", 2, ((0, 1),), (0, 0)),
    GraphletTemplate(1, "path3", 3, ((0, 1), (1, 2)), (1, 2, 1)),
    GraphletTemplate(2, "triangle", 3, ((0, 1), (0, 2), (1, 2)), (3, 3, 3)),
    GraphletTemplate(3, "path4", 4, ((0, 1), (1, 2), (2, 3)), (4, 5, 5, 4)),
    GraphletTemplate(4, "claw", 4, ((0, 1), (0, 2), (0, 3)), (7, 6, 6, 6)),
    GraphletTemplate(5, "cycle4", 4, ((0, 1), (1, 2), (2, 3), (0, 3)), (8, 8, 8, 8)),
    GraphletTemplate(6, "paw", 4, ((0, 1), (1, 2), (1, 3), (2, 3)), (9, 11, 10, 10)),
    GraphletTemplate(7, "diamond", 4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3)), (13, 13, 12, 12)),
    GraphletTemplate(
        8, "clique4", 4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)), (14, 14, 14, 14)
    ),
)

ORBIT_COUNT = 15

#: orbit id -> graphlet index it belongs to
ORBIT_GRAPHLET: dict[int, int] = {}
#: orbit id -> node degree inside the template (the invariant that names it)
ORBIT_DEGREE: dict[int, int] = {}
for _t in TEMPLATES:
    for _node, _orb in enumerate(_t.orbits):
        _deg = _t.degree(_node)
        if _orb in ORBIT_GRAPHLET:
            if ORBIT_GRAPHLET[_orb] != _t.index or ORBIT_DEGREE[_orb] != _deg:
                raise AssertionError(f"orbit {_orb} is inconsistently labelled")
        ORBIT_GRAPHLET[_orb] = _t.index
        ORBIT_DEGREE[_orb] = _deg
if sorted(ORBIT_GRAPHLET) != list(range(ORBIT_COUNT)):
    raise AssertionError("orbit ids must cover 0..14 exactly")


def _derive_keys_and_multiplicity() -> tuple[tuple[Key, ...], dict[Key, int]]:
    """Enumerate every ordered role-pair key and its per-source multiplicity.

    For an ordered key ``(i, j, h)`` the multiplicity is the number of nodes
    on orbit ``j`` at hop distance ``h`` from a fixed node on orbit ``i``
    inside the template.  By orbit symmetry this count is the same whichever
    source node is fixed; that is re-checked here rather than assumed.
    """
    mult: dict[Key, int] = {}
    for t in TEMPLATES:
        per_source: dict[Key, dict[int, int]] = {}
        for x, y in itertools.permutations(range(t.n), 2):
            key = (t.orbits[x], t.orbits[y], t.dist[x][y])
            per_source.setdefault(key, {}).setdefault(x, 0)
            per_source[key][x] += 1
        for key, counts in per_source.items():
            values = set(counts.values())
            sources_on_orbit = sum(1 for o in t.orbits if o == key[0])
            if len(values) != 1 or len(counts) != sources_on_orbit:
                raise AssertionError(f"multiplicity for {key} is not orbit-invariant")
            mult[key] = values.pop()
    keys = tuple(sorted(mult))
    return keys, mult


ORDERED_KEYS, MULTIPLICITY = _derive_keys_and_multiplicity()

#: canonical keys: source orbit <= target orbit; the rest are transposes
CANONICAL_KEYS: tuple[Key, ...] = tuple(k for k in ORDERED_KEYS if k[0] <= k[1])
#: transposed key -> its canonical partner
TRANSPOSED_KEYS: dict[Key, Key] = {
    k: (k[1], k[0], k[2]) for k in ORDERED_KEYS if k[0] > k[1]
}


def canonical_form(key: Key) -> tuple[Key, bool]:
    """Return ``(canonical_key, transposed)`` for any ordered key."""
    if key[0] > key[1]:
        return (key[1], key[0], key[2]), True
    return key, False


def _derive_walk_coefficients(length: int) -> dict[Key, int]:
    """Coefficient of each ordered key in the off-diagonal of A**length.

    A walk of ``length`` steps between two host-graph nodes touches at most
    ``length + 1`` distinct nodes, and the induced subgraph on the touched
    node set is one of the templates.  Attributing each walk to that template
    occurrence, the number of walks between a fixed ordered template pair
    ``(x, y)`` that visit *every* template node is the coefficient with which
    the pair's key enters the decomposition.
    """
    coeff: dict[Key, int] = {}
    for t in TEMPLATES:
        adj = [[False] * t.n for _ in range(t.n)]
        for u, v in t.edges:
            adj[u][v] = adj[v][u] = True
        per_pair: dict[Key, dict[tuple[int, int], int]] = {}
        for x, y in itertools.permutations(range(t.n), 2):
            key = (t.orbits[x], t.orbits[y], t.dist[x][y])
            walks = 0
            for inner in itertools.product(range(t.n), repeat=length - 1):
                seq = (x, *inner, y)
                if all(adj[seq[s]][seq[s + 1]] for s in range(length)) and len(
                    set(seq)
                ) == t.n:
                    walks += 1
            per_pair.setdefault(key, {})[(x, y)] = walks
        for key, by_pair in per_pair.items():
            values = set(by_pair.values())
            if len(values) != 1:
                raise AssertionError(f"walk coefficient for {key} is not orbit-invariant")
            w = values.pop()
            if w:
                coeff[key] = w
    return coeff


#: off-diagonal of the squared adjacency matrix as a key combination
WALK2_COEFF: dict[Key, int] = _derive_walk_coefficients(2)
#: off-diagonal of the cubed adjacency matrix as a key combination
WALK3_COEFF: dict[Key, int] = _derive_walk_coefficients(3)
#: keys a 3-step walk census can reach; the remaining 16 need direct counting
RW3_SEEN: frozenset[Key] = frozenset(WALK3_COEFF)

#: orbit id -> every ordered key whose row sums give that orbit's node count
#: (row sum at x = multiplicity * count of template occurrences with x on the
#: source orbit); the first listed key is the designated route
GDV_ROUTES: dict[int, tuple[Key, ...]] = {
    orb: tuple(k for k in ORDERED_KEYS if k[0] == orb) for orb in range(ORBIT_COUNT)
}


_KEY_RE = re.compile(r"^o(\d+)-o(\d+)-h(\d+)$")
_ALIAS_ONE_HOP_RE = re.compile(r"^o(\d+)-o?(\d+)$")
_ALIAS_TWO_HOP_RE = re.compile(r"^o(\d+)\.\.o?(\d+)$")


def format_key(key: Key) -> str:
    """Render an ordered key in the canonical ``o<i>-o<j>-h<h>`` spelling."""
    i, j, h = key
    return f"o{i}-o{j}-h{h}"


def parse_key(text: str) -> Key:
    """Parse ``o<i>-o<j>-h<h>`` or the short aliases ``o<i>-<j>`` / ``o<i>..<j>``.

    The short forms name one-hop and two-hop keys respectively.  Raises
    ``ValueError`` for anything that does not name one of the 28 ordered keys.
    """
    m = _KEY_RE.match(text)
    if m:
        key = (int(m.group(1)), int(m.group(2)), int(m.group(3)))
    else:
        m = _ALIAS_ONE_HOP_RE.match(text)
        if m:
            key = (int(m.group(1)), int(m.group(2)), 1)
        else:
            m = _ALIAS_TWO_HOP_RE.match(text)
            if m:
                key = (int(m.group(1)), int(m.group(2)), 2)
            else:
                raise ValueError(f"unrecognised key syntax: {text!r}")
    if key not in MULTIPLICITY:
        raise ValueError(f"{text!r} does not name a realisable role-pair key")
    return key
