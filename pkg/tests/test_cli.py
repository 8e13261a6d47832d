"""Command-line interface tests, driven in-process through main()."""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from orbitadj.cli import MUTATE_ENV, main
from orbitadj.countmatrix import read_triplets
from orbitadj.graph import parse_edge_list
from orbitadj.graphlets import ORDERED_KEYS, format_key
from orbitadj.manifest import parse_manifest

# line order makes first-appearance ids a=0, b=1, c=2, d=3, e=4
H_EDGE_LIST = "a\tb\nb\tc\nc\td\nd\te\nb\te\n"

# 3-node paths of H by (end node, centre node): two end at a with centre b,
# and so on; entries are path counts over adjacent (end, centre) pairs
FIG_PATH_END_CENTRE = {
    (0, 1): 2,
    (2, 1): 2,
    (4, 1): 2,
    (1, 2): 1,
    (3, 2): 1,
    (2, 3): 1,
    (4, 3): 1,
    (1, 4): 1,
    (3, 4): 1,
}


@pytest.fixture
def h_file(tmp_path):
    path = tmp_path / "h.tsv"
    path.write_text(H_EDGE_LIST)
    return path


def test_count_writes_all_matrices(h_file, tmp_path):
    out = tmp_path / "out"
    assert main(["count", "--input", str(h_file), "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert names == {
        *(f"{format_key(k)}.tsv" for k in ORDERED_KEYS),
        "labels.tsv",
        "manifest.txt",
    }
    manifest = parse_manifest((out / "manifest.txt").read_text())
    assert manifest.command == "count"
    assert manifest.params["consistency_residual"] == "0"
    assert manifest.params["nodes"] == "5"
    assert float(manifest.timings["total"]) >= 0
    assert (out / "labels.tsv").read_text().splitlines()[0] == "0\ta"


def test_count_single_key_matches_path_matrix(h_file, tmp_path):
    out = tmp_path / "out"
    code = main(
        ["count", "--input", str(h_file), "--out", str(out), "--matrices", "o1-2"]
    )
    assert code == 0
    tsv = [p.name for p in out.glob("*.tsv")]
    assert sorted(tsv) == ["labels.tsv", "o1-o2-h1.tsv"]
    matrix, key = read_triplets((out / "o1-o2-h1.tsv").read_text())
    assert key == (1, 2, 1)
    expected = np.zeros((5, 5), dtype=np.int64)
    for (r, c), v in FIG_PATH_END_CENTRE.items():
        expected[r, c] = v
    np.testing.assert_array_equal(matrix.to_dense(), expected)


def test_count_rejects_empty_input(tmp_path):
    empty = tmp_path / "empty.tsv"
    empty.write_text("")
    assert main(["count", "--input", str(empty), "--out", str(tmp_path / "o")]) == 1


def test_count_rejects_bad_key(h_file, tmp_path, capsys):
    code = main(
        [
            "count",
            "--input",
            str(h_file),
            "--out",
            str(tmp_path / "o"),
            "--matrices",
            "o99-0",
        ]
    )
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_count_missing_input_file(tmp_path):
    code = main(
        ["count", "--input", str(tmp_path / "nope.tsv"), "--out", str(tmp_path / "o")]
    )
    assert code == 1


def test_count_thread_outputs_bit_identical(h_file, tmp_path):
    outs = []
    for threads in ("1", "2"):
        out = tmp_path / f"t{threads}"
        assert (
            main(
                [
                    "count",
                    "--input",
                    str(h_file),
                    "--out",
                    str(out),
                    "--threads",
                    threads,
                ]
            )
            == 0
        )
        outs.append(out)
    for k in ORDERED_KEYS:
        name = f"{format_key(k)}.tsv"
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_verify_accepts_h(h_file, capsys):
    assert main(["verify", "--input", str(h_file)]) == 0
    assert "verify OK" in capsys.readouterr().out


def test_verify_names_injected_divergence(h_file, capsys, monkeypatch):
    monkeypatch.setenv(MUTATE_ENV, "o1-2:0:1:1")
    assert main(["verify", "--input", str(h_file)]) == 2
    err = capsys.readouterr().err
    assert "o1-o2-h1" in err and "(0, 1)" in err


def test_verify_respects_cap(h_file, capsys):
    assert main(["verify", "--input", str(h_file), "--cap", "4"]) == 3
    assert "resource cap" in capsys.readouterr().err


def test_embed_identity_chain_files_identical(h_file, tmp_path):
    a = tmp_path / "gopmi.tsv"
    b = tmp_path / "rwpmi.tsv"
    assert (
        main(
            [
                "embed",
                "--input",
                str(h_file),
                "--pmi",
                "gopmi",
                "--key",
                "o0-0",
                "--dim",
                "2",
                "--out",
                str(a),
            ]
        )
        == 0
    )
    assert (
        main(
            [
                "embed",
                "--input",
                str(h_file),
                "--pmi",
                "rwpmi",
                "--power",
                "1",
                "--dim",
                "2",
                "--out",
                str(b),
            ]
        )
        == 0
    )
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert len(lines) == 5
    assert all(len(line.split("\t")) == 3 for line in lines)
    manifest = parse_manifest((a.with_name(a.name + ".manifest.txt")).read_text())
    assert manifest.params["produced_dim"] == "2"


def test_embed_gopmi_nontrivial_key(h_file, tmp_path):
    out = tmp_path / "emb.tsv"
    code = main(
        [
            "embed",
            "--input",
            str(h_file),
            "--pmi",
            "gopmi",
            "--key",
            "o1-o1-h2",
            "--dim",
            "2",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert len(out.read_text().splitlines()) == 5


def test_embed_deepwalk_smoke(h_file, tmp_path):
    out = tmp_path / "deep.tsv"
    code = main(
        [
            "embed",
            "--input",
            str(h_file),
            "--pmi",
            "deepwalk",
            "--T",
            "3",
            "--dim",
            "4",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    manifest = parse_manifest((out.parent / "deep.tsv.manifest.txt").read_text())
    assert manifest.params["T"] == "3"
    assert int(manifest.params["produced_dim"]) >= 1


def test_embed_rejects_bad_flags(h_file, tmp_path):
    base = ["embed", "--input", str(h_file), "--dim", "2", "--out", str(tmp_path / "x")]
    assert main([*base, "--pmi", "gopmi", "--key", "o99-0"]) == 1
    assert main([*base, "--pmi", "gopmi"]) == 1  # --key missing
    assert main([*base, "--pmi", "rwpmi"]) == 1  # --power missing
    assert main([*base, "--pmi", "rwpmi", "--power", "7"]) == 1
    assert main([*base, "--pmi", "deepwalk"]) == 1  # --T missing


def test_generate_k5_to_stdout(capsys):
    assert main(["generate", "--model", "er", "--nodes", "5", "--edges", "10"]) == 0
    g = parse_edge_list(capsys.readouterr().out)
    assert g.n == 5 and g.m == 10
    assert all(g.has_edge(u, v) for v in range(5) for u in range(v))


def test_generate_to_file_with_manifest(tmp_path):
    out = tmp_path / "g.tsv"
    code = main(
        [
            "generate",
            "--model",
            "ba",
            "--nodes",
            "30",
            "--edges",
            "60",
            "--seed",
            "9",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert parse_edge_list(out.read_text()).m == 60
    manifest = parse_manifest((tmp_path / "g.tsv.manifest.txt").read_text())
    assert manifest.params["model"] == "BA"


def test_generate_rejects_infeasible(capsys):
    assert main(["generate", "--model", "er", "--nodes", "4", "--edges", "7"]) == 1


def test_bench_prints_per_phase_table(capsys):
    code = main(
        [
            "bench",
            "--model",
            "er",
            "--nodes",
            "30",
            "--edges",
            "60",
            "--seeds",
            "2",
        ]
    )
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split("\t") == [
        "model",
        "nodes",
        "edges",
        "seed",
        "enumeration",
        "rhs",
        "solve",
        "cube",
        "total",
    ]
    assert len(lines) == 3
    for row in lines[1:]:
        cells = row.split("\t")
        assert cells[0] == "ER" and cells[1] == "30" and cells[2] == "60"
        assert all(float(c) >= 0 for c in cells[4:])


def test_bench_rejects_zero_seeds(capsys):
    code = main(
        ["bench", "--model", "er", "--nodes", "10", "--edges", "20", "--seeds", "0"]
    )
    assert code == 1


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["count"]) == 1  # missing required flags


def test_module_entry_point_version():
    proc = subprocess.run(
        [sys.executable, "-m", "orbitadj.cli", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "orbitadj" in proc.stdout


def test_kernel_comparison_benchmark_script():
    script = Path(__file__).resolve().parent.parent / "benchmarks" / "compare_kernels.py"
    proc = subprocess.run(
        [sys.executable, str(script), "--model", "er", "--nodes", "60",
         "--edges", "120", "--seeds", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
    assert len(lines) == 2
    header = lines[0].split("\t")
    row = dict(zip(header, lines[1].split("\t")))
    assert row["model"] == "ER"
    for tag in ("total_numba", "total_numpy"):
        assert float(row[tag]) >= 0.0
