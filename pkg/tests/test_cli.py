import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from exact_ising import random_cluster
from exact_ising.cli import BENCH_FIELDS, main, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_single_site_grid(capsys):
    code, out, _ = run(capsys, "sample", "--size", "1", "--beta", "5", "--samples", "4", "--seed", "7")
    assert code == 0
    blocks = out.strip("\n").split("\n\n")
    assert len(blocks) == 4 and all(b in ("+", "-") for b in blocks)


def test_grid_json_round_trip(capsys):
    args = ["sample", "--size", "4", "--beta", "1.3", "--samples", "5", "--seed", "3"]
    _, grid, _ = run(capsys, *args)
    _, js, _ = run(capsys, *args, "--format", "json")
    from_json = [np.array(s, dtype=np.int8) for s in json.loads(js)]
    from_grid = parse_grid(grid)
    assert len(from_grid) == 5
    for a, b in zip(from_grid, from_json):
        np.testing.assert_array_equal(a, b)
    assert all(len(g.splitlines()) == 4 for g in grid.strip().split("\n\n"))


@pytest.mark.parametrize("args", [
    ["sample", "--size", "3", "--beta", "1.2", "--samples", "6", "--seed", "11", "--branch", "dual"],
    ["sample", "--size", "5", "--beta", "0.6", "--samples", "3", "--format", "json", "--jobs", "2"],
    ["info", "--beta", "1.2"],
])
def test_determinism(capsys, args):
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first


def test_dual_fast_direct_capped(capsys):
    code, _, _ = run(capsys, "sample", "--size", "3", "--beta", "1.2", "--branch", "dual")
    assert code == 0
    code, out, err = run(capsys, "sample", "--size", "10", "--beta", "2.0", "--branch", "direct",
                         "--cap", "10000")
    assert code == 1 and out == "" and "cap" in err


def test_stats_to_stderr(capsys):
    code, out, err = run(capsys, "sample", "--size", "3", "--beta", "0.5", "--samples", "3", "--stats")
    rows = list(csv.DictReader(io.StringIO(err)))
    assert code == 0 and len(rows) == 3
    assert [r["seed"] for r in rows] == ["0", "1", "2"]
    assert all(r["branch"] == "direct" and int(r["total_updates"]) > 0 for r in rows)
    assert "+" in out or "-" in out


@pytest.mark.parametrize("args,flag", [
    (["sample", "--size", "0", "--beta", "1"], "--size"),
    (["sample", "--size", "3", "--beta", "-1"], "--beta"),
    (["sample", "--size", "3", "--beta", "1", "--format", "png"], "--format"),
    (["sample", "--size", "1", "--beta", "2", "--branch", "dual"], "--branch"),
    (["info", "--beta", "-0.5"], "--beta"),
    (["bench", "--sizes", "8,x", "--beta", "0.5"], "--sizes"),
])
def test_usage_errors(capsys, args, flag):
    with pytest.raises(SystemExit) as info:
        main(args)
    assert info.value.code == 2
    assert flag in capsys.readouterr().err


def parse_info(out):
    return dict(line.split(None, 1) for line in out.strip().splitlines())


def test_info_near_critical(capsys):
    code, out, _ = run(capsys, "info", "--beta", "0.881373587")
    info = parse_info(out)
    assert code == 0 and info["branch"] == "direct"
    assert info["beta_c"] == "0.88137358702"


def test_info_low_temperature(capsys):
    info = parse_info(run(capsys, "info", "--beta", "1.2")[1])
    assert info["branch"] == "dual"
    assert float(info["beta*"]) == pytest.approx(0.6217, abs=1e-4)
    assert info["beta*"] == f"{random_cluster.dual_beta(1.2):.12g}"
    assert float(info["p*"]) == pytest.approx(random_cluster.dual_p(random_cluster.beta_to_p(1.2)))


def test_info_zero(capsys):
    info = parse_info(run(capsys, "info", "--beta", "0")[1])
    assert float(info["p"]) == 0.0
    assert "beta*" not in info and "p*" not in info


def test_validate_quick(capsys):
    code, out, _ = run(capsys, "validate", "--level", "quick")
    assert code == 0
    assert "FAIL" not in out and out.count("PASS") >= 20


def test_validate_catches_tampered_dual_beta(capsys, monkeypatch):
    monkeypatch.setattr(random_cluster, "dual_beta", lambda b: np.log(np.cosh(b / 2)))
    code, out, err = run(capsys, "validate", "--level", "quick")
    assert code == 1
    assert "FAIL" in out and "self-dual beta" in err


def read_bench(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bench_csv(capsys, tmp_path):
    path = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "--sizes", "4,6", "--beta", "0.6", "--reps", "3",
                     "--seed", "5", "--out", str(path))
    assert code == 0
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(BENCH_FIELDS)
    rows = read_bench(text)
    assert [r["rep"] for r in rows] == ["0", "1", "2", "mean"] * 2
    for L in ("4", "6"):
        reps = [r for r in rows if r["L"] == L and r["rep"] != "mean"]
        summary = [r for r in rows if r["L"] == L and r["rep"] == "mean"][0]
        mean = np.mean([int(r["total_updates"]) for r in reps])
        assert float(summary["total_updates"]) == pytest.approx(mean, rel=1e-5)
        N = int(L) ** 2
        assert float(summary["ratio"]) == pytest.approx(mean / (N * np.log(N)), rel=1e-5)
        assert all(int(r["wall_ns"]) > 0 for r in reps)


def test_bench_deterministic_without_wall_time(capsys):
    args = ["bench", "--sizes", "5", "--beta", "1.2", "--reps", "1", "--seed", "9", "--no-wall-time"]
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first
    assert read_bench(first)[0]["branch"] == "dual"


def test_bench_censoring(capsys):
    args = ["bench", "--sizes", "10", "--beta", "2.0", "--reps", "2", "--branch", "direct",
            "--cap", "20000"]
    code, out, err = run(capsys, *args)
    assert code == 1 and "allow-cap" in err
    code, out, _ = run(capsys, *args, "--allow-cap")
    rows = read_bench(out)
    assert code == 0
    assert [r["censored"] for r in rows] == ["1", "1", "2"]
    assert all(int(r["total_updates"]) <= 20000 for r in rows[:2])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "exact_ising", "info", "--beta", "0.4"],
                          capture_output=True, text=True, check=True)
    assert "branch   direct" in proc.stdout
