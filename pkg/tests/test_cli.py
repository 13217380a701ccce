import json
import subprocess
import sys

import pytest

from conftest import BLOCKS
from grecon.cli import format_table, main
from grecon.io import write_dense


@pytest.fixture
def small_dense(tmp_path):
    p = tmp_path / "small.txt"
    p.write_text("1011\n0110\n0011\n")
    return p


@pytest.fixture
def small_fimi(tmp_path):
    p = tmp_path / "small.dat"
    p.write_text("1 3 4\n2 3\n3 4\n")
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def last_json(text):
    return json.loads(text.strip().splitlines()[-1])


@pytest.mark.parametrize("algorithm", ["grecon3", "grecon2", "naive", "grecond"])
def test_factorize_small(capsys, small_dense, algorithm):
    code, out, _ = run(capsys, "factorize", "--input", small_dense, "--format", "dense", "--algorithm", algorithm)
    assert code == 0
    s = last_json(out)
    assert s["error"] == 0 and s["coverage"] == 1.0
    if algorithm != "grecond":
        assert s["k"] == 3 and s["coverage_per_factor"] == [4, 2, 1]


def test_factorize_epsilon(capsys, small_fimi):
    code, out, _ = run(capsys, "factorize", "--input", small_fimi, "--epsilon", "0.75")
    assert code == 0
    assert last_json(out)["coverage"] >= 0.75


def test_factorize_reports_concept_count(capsys, small_fimi):
    _, out, _ = run(capsys, "factorize", "--input", small_fimi, "--algorithm", "grecon3")
    assert last_json(out)["concept_count"] == 5


def test_factorize_output_files(capsys, tmp_path, small_fimi):
    out_json = tmp_path / "f.json"
    out_text = tmp_path / "f.txt"
    run(capsys, "factorize", "--input", small_fimi, "--output", out_json, "--output-format", "json")
    run(capsys, "factorize", "--input", small_fimi, "--output", out_text)
    assert json.loads(out_json.read_text())["coverage_per_factor"] == [4, 2, 1]
    assert out_text.read_text().splitlines()[0] == "0 2 | 2 3"


def test_factorize_deterministic(capsys, tmp_path):
    p = tmp_path / "blocks.txt"
    write_dense(BLOCKS, p)
    outs = []
    for _ in range(2):
        _, out, _ = run(capsys, "factorize", "--input", p, "--format", "dense", "--small-threshold", "2")
        s = last_json(out)
        s.pop("wall_ms")
        outs.append(json.dumps(s, sort_keys=True))
    assert outs[0] == outs[1]


def test_concepts(capsys, tmp_path, small_fimi):
    dump = tmp_path / "c.txt"
    code, out, _ = run(capsys, "concepts", "--input", small_fimi, "--dump", dump)
    assert code == 0 and last_json(out)["concept_count"] == 5
    lines = dump.read_text().splitlines()
    assert len(lines) == 5
    assert lines[0] == "0 1 2 | 2" and " | 0 1 2 3" in lines


def test_concepts_zero_matrix(capsys, tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("0\n")
    _, out, _ = run(capsys, "concepts", "--input", p, "--format", "dense")
    assert last_json(out)["concept_count"] == 2


def test_concepts_blocks(capsys, tmp_path):
    from grecon.oracle import brute_force_concepts

    p = tmp_path / "blocks.txt"
    write_dense(BLOCKS, p)
    _, out, _ = run(capsys, "concepts", "--input", p, "--format", "dense")
    assert last_json(out)["concept_count"] == len(brute_force_concepts(BLOCKS))


def test_exit_codes(capsys, tmp_path, small_fimi):
    assert run(capsys, "factorize", "--input", tmp_path / "missing.dat")[0] == 2
    bad = tmp_path / "bad.dat"
    bad.write_text("1 x\n")
    assert run(capsys, "factorize", "--input", bad)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["factorize", "--input", str(small_fimi), "--epsilon", "1.5"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["factorize", "--input", str(small_fimi), "--algorithm", "magic"])
    assert exc.value.code == 1
    assert run(capsys, "bench")[0] == 1


def test_bench_tiny(capsys, small_dense, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(
        capsys, "bench", "--input", small_dense, "--format", "dense", "--runs", "2",
        "--algorithms", "grecond,grecon2,grecon3,naive", "--json", report,
    )
    assert code == 0
    rec = json.loads(report.read_text())
    assert len(rec["results"]) == 4 * 6
    assert all(r["wall_ms"] >= 0 for r in rec["results"])
    # coverage sequences of smaller epsilons are prefixes of larger ones
    for algorithm in ("grecon2", "grecon3"):
        seqs = [r["coverage_per_factor"] for r in rec["results"] if r["algorithm"] == algorithm]
        for short, long in zip(seqs, seqs[1:]):
            assert long[: len(short)] == short
    assert "grecon3" in out


def test_bench_synthetic_appends(capsys, monkeypatch):
    monkeypatch.setenv("BMF_SEED", "7")
    code, out, _ = run(
        capsys, "bench", "--synthetic", "random", "--shape", "2000x20", "--density", "0.4",
        "--runs", "1", "--epsilons", "1.0", "--algorithms", "grecon2,grecon3",
    )
    assert code == 0
    rows = {r["algorithm"]: r for r in last_json(out)["results"]}
    assert rows["grecon3"]["cell_appends"] < rows["grecon2"]["cell_appends"]
    assert rows["grecon3"]["coverage_per_factor"] == rows["grecon2"]["coverage_per_factor"]


def test_format_table():
    rows = [
        {"algorithm": "grecon2", "epsilon": 1.0, "wall_ms": 12.0, "cell_appends": 40},
        {"algorithm": "grecon3", "epsilon": 1.0, "wall_ms": 3.25, "cell_appends": 4},
    ]
    text = format_table(rows)
    assert text.splitlines()[0].split() == ["algorithm", "1"]
    assert "grecon3 appends" in text


def test_console_entry_point(small_fimi):
    proc = subprocess.run(
        [sys.executable, "-m", "grecon.cli", "concepts", "--input", str(small_fimi)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["concept_count"] == 5
