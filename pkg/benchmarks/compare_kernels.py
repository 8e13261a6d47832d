"""Benchmark the jit kernels against the pure-numpy fallback.

Kernel selection happens at import time (ORBITADJ_KERNELS), so each
implementation is timed in its own subprocess running ``orbitadj bench``
on identical seeded graphs; the two phase tables are then merged into one
comparison with per-phase speedups.

Usage:
    python3 benchmarks/compare_kernels.py --model er --nodes 2000 --edges 40000 --seeds 3
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys


def run_bench(implementation: str, args: argparse.Namespace) -> list[dict[str, str]]:
    """Run ``orbitadj bench`` under one kernel implementation, parsed."""
    env = dict(os.environ, ORBITADJ_KERNELS=implementation)
    command = [
        sys.executable,
        "-m",
        "orbitadj.cli",
        "bench",
        "--model",
        args.model,
        "--nodes",
        str(args.nodes),
        "--edges",
        str(args.edges),
        "--seeds",
        str(args.seeds),
        "--threads",
        str(args.threads),
    ]
    proc = subprocess.run(command, env=env, capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(
            f"bench under {implementation} failed "
            f"(exit {proc.returncode}):\n{proc.stderr}"
        )
    lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
    header = lines[0].split("\t")
    return [dict(zip(header, line.split("\t"))) for line in lines[1:]]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="compare jit and pure-numpy kernel timings"
    )
    parser.add_argument("--model", choices=("er", "ba"), default="er")
    parser.add_argument("--nodes", type=int, default=2000)
    parser.add_argument("--edges", type=int, default=40000)
    parser.add_argument("--seeds", type=int, default=3)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    rows = {name: run_bench(name, args) for name in ("numba", "numpy")}
    phases = ("enumeration", "rhs", "solve", "cube", "total")

    print(
        "\t".join(
            ["model", "nodes", "edges", "seed"]
            + [f"{p}_{tag}" for p in phases for tag in ("numba", "numpy", "x")]
        )
    )
    for jit_row, np_row in zip(rows["numba"], rows["numpy"]):
        cells = [jit_row["model"], jit_row["nodes"], jit_row["edges"], jit_row["seed"]]
        for phase in phases:
            a = float(jit_row[phase])
            b = float(np_row[phase])
            ratio = b / a if a > 0 else float("inf")
            cells += [f"{a:.3f}", f"{b:.3f}", f"{ratio:.1f}"]
        print("\t".join(cells))
    return 0


if __name__ == "__main__":
    sys.exit(main())
