"""Command-line interface.

Five subcommands, all deterministic given their inputs and flags:

* ``count``    - compute orbit-pair adjacency matrices and write them as
  triplet files plus a label map and a run manifest;
* ``verify``   - recount a small graph by brute force and diff every
  matrix, the orbit-degree vectors, and the walk-decomposition residuals;
* ``embed``    - build a PMI matrix (gopmi / rwpmi / deepwalk) and write
  a truncated-SVD node embedding;
* ``generate`` - emit a seeded uniform or preferential-attachment graph
  as edge-list text;
* ``bench``    - generate graphs across seeds, run the full count, and
  print a per-phase timing table.

Exit codes: 0 success, 1 usage or input problem, 2 internal
inconsistency, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
import warnings as _warnings
from pathlib import Path

import numpy as np

from . import __version__
from .countmatrix import CountMatrix, triplet_filename, write_triplets
from .derived import gdv, rw_decompose
from .embeddings import deepwalk_pmi, embed, embedding_text, gopmi, rwpmi
from .errors import InconsistencyError, InputError, ResourceCapError
from .graph import Graph, parse_edge_list
from .graphlets import ORDERED_KEYS, format_key, parse_key
from .manifest import RunManifest
from .netgen import GenSpec, generate
from .oracle import ORACLE_NODE_CAP, brute_force_all
from .solver import compute_all

__all__ = ["main", "build_parser"]

#: test-harness fault injection: "KEY:ROW:COL[:DELTA]" perturbs one
#: computed entry before the verify diff
MUTATE_ENV = "ORBITADJ_VERIFY_MUTATE"

#: how solver phases roll up into the benchmark table columns
_BENCH_PHASES = (
    ("enumeration", ("setup", "three_node", "chord_clique")),
    ("rhs", ("rhs",)),
    ("solve", ("solve_double", "solve_single", "assemble")),
    ("cube", ("walks",)),
    ("total", ("total",)),
)


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as InputError (exit code 1)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _read_graph(path: str) -> Graph:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_edge_list(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _parse_cli_key(token: str):
    try:
        return parse_key(token)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _graph_warnings(graph: Graph) -> list[str]:
    return [
        f"dropped {count} {kind.replace('_', ' ')} while parsing"
        for kind, count in sorted(graph.parse_warnings.items())
    ]


def _adjacency_count_matrix(graph: Graph) -> CountMatrix:
    dense = np.zeros((graph.n, graph.n), dtype=np.int64)
    for u in range(graph.n):
        dense[u, graph.neighbors(u)] = 1
    return CountMatrix.from_dense(dense)


# ---------------------------------------------------------------------------
# count


def cmd_count(args) -> int:
    graph = _read_graph(args.input)
    if args.matrices.strip().lower() == "all":
        keys = list(ORDERED_KEYS)
    else:
        keys = []
        for token in args.matrices.split(","):
            key = _parse_cli_key(token.strip())
            if key not in keys:
                keys.append(key)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    result, report = compute_all(graph, threads=args.threads)
    with result:
        for key in keys:
            with open(out / triplet_filename(key), "w", encoding="utf-8") as fh:
                write_triplets(fh, result.matrix(key), key)
    (out / "labels.tsv").write_text(graph.label_map_text(), encoding="utf-8")

    manifest = RunManifest(command="count", inputs=[args.input])
    manifest.set_param("out", str(out))
    manifest.set_param("matrices", ",".join(format_key(k) for k in keys))
    manifest.set_param("threads", args.threads)
    manifest.set_param("nodes", graph.n)
    manifest.set_param("edges", graph.m)
    manifest.set_param("consistency_residual", report.consistency_residual)
    manifest.set_param("negative_entries", report.negative_entry_count)
    manifest.set_param("mode", report.mode)
    manifest.set_param("implementation", report.implementation)
    manifest.add_timings(report.timings)
    manifest.timings["wall"] = time.perf_counter() - t0
    manifest.warnings = _graph_warnings(graph)
    manifest.write(out / "manifest.txt")
    print(f"wrote {len(keys)} matrices for n={graph.n}, m={graph.m} to {out}")
    return 0


# ---------------------------------------------------------------------------
# verify


def _parse_mutation(raw: str) -> tuple[tuple[int, int, int], int, int, int]:
    parts = raw.split(":")
    if len(parts) not in (3, 4):
        raise InputError(f"{MUTATE_ENV} must be KEY:ROW:COL[:DELTA], got {raw!r}")
    key = _parse_cli_key(parts[0])
    row, col = int(parts[1]), int(parts[2])
    delta = int(parts[3]) if len(parts) == 4 else 1
    return key, row, col, delta


def cmd_verify(args) -> int:
    graph = _read_graph(args.input)
    result, report = compute_all(graph, threads=args.threads)
    with result:
        oracle = brute_force_all(graph, cap=args.cap)
        computed = {key: result.matrix(key).to_dense() for key in ORDERED_KEYS}
        vectors = gdv(result)
        walk2 = rw_decompose(graph, result, 2, threads=args.threads)
        walk3 = rw_decompose(graph, result, 3, threads=args.threads)

    raw = os.environ.get(MUTATE_ENV)
    if raw:
        key, row, col, delta = _parse_mutation(raw)
        computed[key][row, col] += delta

    for key in ORDERED_KEYS:
        got, want = computed[key], oracle.matrix(key)
        if not np.array_equal(got, want):
            row, col = map(int, np.argwhere(got != want)[0])
            raise InconsistencyError(
                f"matrix {format_key(key)} diverges at pair ({row}, {col}): "
                f"counted {got[row, col]}, brute force says {want[row, col]}"
            )
    if not np.array_equal(vectors, oracle.gdv):
        node, orbit = map(int, np.argwhere(vectors != oracle.gdv)[0])
        raise InconsistencyError(
            f"orbit-degree vector diverges at node {node}, orbit {orbit}: "
            f"counted {vectors[node, orbit]}, brute force says "
            f"{oracle.gdv[node, orbit]}"
        )
    for walk in (walk2, walk3):
        if not walk.residual_is_zero:
            row, col = walk.residual.to_csr().nonzero()
            raise InconsistencyError(
                f"length-{walk.length} walk decomposition leaves a residual "
                f"at pair ({int(row[0])}, {int(col[0])})"
            )
    if walk2.diagonal_matches_degrees is False:
        raise InconsistencyError(
            "squared-adjacency diagonal does not match the degree sequence"
        )
    if report.consistency_residual != 0:
        raise InconsistencyError(
            f"solver consistency residual is {report.consistency_residual}"
        )
    print(
        f"verify OK: n={graph.n}, m={graph.m}; 28 matrices, orbit-degree "
        f"vectors, and walk residuals all match brute force"
    )
    return 0


# ---------------------------------------------------------------------------
# embed


def cmd_embed(args) -> int:
    graph = _read_graph(args.input)
    t0 = time.perf_counter()
    manifest = RunManifest(command="embed", inputs=[args.input])
    manifest.set_param("pmi", args.pmi)
    manifest.set_param("dim", args.dim)
    manifest.set_param("b", args.b)

    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        if args.pmi == "gopmi":
            if args.key is None:
                raise InputError("--pmi gopmi needs --key")
            key = _parse_cli_key(args.key)
            manifest.set_param("key", format_key(key))
            if key == (0, 0, 1):
                # the edge matrix is the adjacency; skip the full count
                pmi = gopmi(_adjacency_count_matrix(graph), b=args.b)
            else:
                result, _ = compute_all(graph, threads=args.threads)
                with result:
                    pmi = gopmi(result.matrix(key), b=args.b)
        elif args.pmi == "rwpmi":
            if args.power is None:
                raise InputError("--pmi rwpmi needs --power")
            manifest.set_param("power", args.power)
            pmi = rwpmi(graph, p=args.power, b=args.b)
        else:
            if args.T is None:
                raise InputError("--pmi deepwalk needs --T")
            manifest.set_param("T", args.T)
            pmi = deepwalk_pmi(graph, T=args.T, b=args.b)
        embedding = embed(pmi, args.dim)

    Path(args.out).write_text(embedding_text(graph, embedding), encoding="utf-8")
    manifest.set_param("produced_dim", embedding.dim)
    manifest.timings["wall"] = time.perf_counter() - t0
    manifest.warnings = _graph_warnings(graph) + [
        str(w.message) for w in caught
    ]
    manifest.write(f"{args.out}.manifest.txt")
    print(f"wrote {embedding.n}x{embedding.dim} embedding to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# generate / bench


def cmd_generate(args) -> int:
    spec = GenSpec(args.model, args.nodes, args.edges, args.seed)
    t0 = time.perf_counter()
    graph = generate(spec)
    text = graph.to_edge_list_text()
    if args.out is None:
        sys.stdout.write(text)
        return 0
    Path(args.out).write_text(text, encoding="utf-8")
    manifest = RunManifest(command="generate")
    manifest.set_param("model", spec.model)
    manifest.set_param("nodes", spec.n)
    manifest.set_param("edges", spec.m)
    manifest.set_param("seed", spec.seed)
    manifest.set_param("out", args.out)
    manifest.timings["wall"] = time.perf_counter() - t0
    manifest.write(f"{args.out}.manifest.txt")
    print(f"wrote {spec.model} graph n={spec.n}, m={spec.m} to {args.out}")
    return 0


def cmd_bench(args) -> int:
    if args.seeds < 1:
        raise InputError(f"need at least one seed, got {args.seeds}")
    columns = [name for name, _ in _BENCH_PHASES]
    print("\t".join(["model", "nodes", "edges", "seed", *columns]))
    for seed in range(args.seeds):
        spec = GenSpec(args.model, args.nodes, args.edges, seed)
        graph = generate(spec)
        result, report = compute_all(graph, threads=args.threads)
        result.cleanup()
        cells = [spec.model, str(spec.n), str(spec.m), str(seed)]
        for _, phases in _BENCH_PHASES:
            seconds = sum(report.timings.get(p, 0.0) for p in phases)
            cells.append(f"{seconds:.3f}")
        print("\t".join(cells))
        sys.stdout.flush()
    return 0


# ---------------------------------------------------------------------------
# parser wiring


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="orbitadj",
        description="Orbit-pair adjacency counting, verification, and embeddings.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("count", help="count matrices and write triplet files")
    p.add_argument("--input", required=True, help="edge-list file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--matrices",
        default="all",
        help="'all' or comma-separated matrix keys (e.g. o1-2,o4-o4-h3)",
    )
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", help="diff the solver against brute force")
    p.add_argument("--input", required=True, help="edge-list file")
    p.add_argument(
        "--cap",
        type=int,
        default=ORACLE_NODE_CAP,
        help=f"largest node count to brute-force (default {ORACLE_NODE_CAP})",
    )
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("embed", help="write a PMI-based node embedding")
    p.add_argument("--input", required=True, help="edge-list file")
    p.add_argument("--pmi", required=True, choices=("gopmi", "rwpmi", "deepwalk"))
    p.add_argument("--key", help="matrix key for gopmi (e.g. o0-0)")
    p.add_argument("--power", type=int, help="adjacency power for rwpmi (1-3)")
    p.add_argument("--T", type=int, help="walk-length cap for deepwalk")
    p.add_argument("--dim", type=int, required=True, help="embedding dimension")
    p.add_argument("--b", type=float, default=1.0, help="PMI shift (default 1)")
    p.add_argument("--out", required=True, help="embedding output file")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("generate", help="emit a seeded random graph")
    p.add_argument("--model", required=True, choices=("er", "ba"))
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="edge-list output file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="time the full count across seeds")
    p.add_argument("--model", required=True, choices=("er", "ba"))
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--seeds", type=int, required=True, help="seeds 0..K-1")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InconsistencyError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover - exercised via subprocess
    sys.exit(main())
