import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from irkprec.cli import dumps_json, fmt, main, parse_args


def run_cli(argv, tmp_path, name="out.txt"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def test_parse_valid():
    args = parse_args(["spectrum", "--problem", "laplace1d", "--n", "50", "--tau", "0.01",
                       "--stages", "3"])
    assert args.command == "spectrum" and args.n == 50 and args.stages == 3 and args.tau == 0.01


@pytest.mark.parametrize("argv", [
    ["spectrum", "--stages", "0"],
    ["spectrum", "--stages", "11"],
    ["spectrum", "--n", "-3"],
    ["spectrum", "--tau", "0"],
    ["spectrum", "--tau", "nan"],
    ["spectrum", "--bogus"],
    ["spectrum", "--method", "qz"],
    ["branches", "--mu-min", "5", "--mu-max", "1"],
    ["branches", "--grid", "1"],
    ["integrate", "--steps", "-1"],
    [],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_tableau_json(tmp_path):
    code, text = run_cli(["tableau", "--stages", "2", "--json"], tmp_path)
    assert code == 0
    assert '"Uhat_norm2": 0.3333333333333333' in text
    data = json.loads(text)
    assert np.allclose(data["A"], [[5 / 12, -1 / 12], [3 / 4, 1 / 4]])


def test_tableau_text(tmp_path):
    code, text = run_cli(["tableau", "--stages", "3"], tmp_path)
    assert code == 0 and text.endswith("\n") and not text.endswith("\n\n")


def test_pencil_csv(tmp_path):
    code, text = run_cli(["pencil", "--n", "7", "--tau", "1"], tmp_path)
    r = rows(text)
    assert code == 0 and r[0] == ["k", "mu"] and len(r) == 8
    assert float(r[1][1]) == pytest.approx(
        1.0 * 6 * 64 * (1 - np.cos(np.pi / 8)) / (2 + np.cos(np.pi / 8)), rel=1e-12)


@pytest.mark.parametrize("method", ["matrix", "pencil", "charpoly"])
@pytest.mark.parametrize("problem,n,size", [("laplace1d", 12, 12), ("laplace2d", 3, 9),
                                            ("scalar", 5, 1)])
def test_spectrum_rows(tmp_path, method, problem, n, size):
    code, text = run_cli(["spectrum", "--problem", problem, "--n", str(n), "--stages", "3",
                          "--method", method], tmp_path)
    r = rows(text)
    assert code == 0 and r[0] == ["k", "mu", "re", "im", "branch"]
    assert len(r) - 1 == size * 3
    ones = sum(abs(complex(float(x[2]), float(x[3])) - 1) <= 1e-9 for x in r[1:])
    assert ones >= size


def test_branches(tmp_path, capsys):
    code, text = run_cli(["branches", "--stages", "3", "--grid", "50"], tmp_path)
    r = rows(text)
    assert code == 0 and r[0] == ["k", "mu", "re", "im", "branch"] and len(r) == 151
    assert "merge" in capsys.readouterr().err


def test_verify(tmp_path):
    code, text = run_cli(["verify", "--n", "10", "--stages", "3", "--tau", "0.1"], tmp_path)
    assert code == 0
    line = [l for l in text.splitlines() if l.startswith("max_mismatch=")]
    assert len(line) == 1 and float(line[0].split("=")[1]) <= 1e-8


def test_verify_failure_exit(tmp_path):
    code, _ = run_cli(["verify", "--n", "10", "--tol", "1e-300"], tmp_path)
    assert code == 1


@pytest.mark.parametrize("precond", ["on", "off"])
def test_gmres_json(tmp_path, precond):
    code, text = run_cli(["gmres", "--n", "20", "--tau", "0.01", "--precond", precond], tmp_path)
    data = json.loads(text)
    assert code == 0 and data["converged"]
    assert data["iterations"] == len(data["history"]) - 1 and data["history"][0] == 1.0
    assert data["history"][-1] <= 1e-10


def test_gmres_precond_helps(tmp_path):
    on = json.loads(run_cli(["gmres", "--n", "50", "--tau", "0.01"], tmp_path, "a")[1])
    off = json.loads(run_cli(["gmres", "--n", "50", "--tau", "0.01", "--precond", "off"],
                             tmp_path, "b")[1])
    assert on["iterations"] <= off["iterations"]


def test_integrate_csv(tmp_path):
    code, text = run_cli(["integrate", "--n", "6", "--steps", "4", "--T", "0.2"], tmp_path)
    r = rows(text)
    assert code == 0 and r[0] == ["step", "t", "iterations"] + ["u%d" % i for i in range(1, 7)]
    assert len(r) == 6
    norms = [np.linalg.norm([float(v) for v in row[3:]]) for row in r[1:]]
    assert np.all(np.diff(norms) < 0)


def test_bound_csv(tmp_path):
    code, text = run_cli(["bound", "--n", "10", "--tau", "0.01", "--L", "6"], tmp_path)
    assert code == 0 and text.startswith("# kappa_S=")
    r = rows(text)
    assert r[0] == ["ell", "minmax", "bound"] and len(r) == 8
    mm = [float(x[1]) for x in r[1:]]
    assert mm[0] == 1.0 and np.all(np.diff(mm) <= 0)


@pytest.mark.parametrize("argv", [
    ["tableau", "--stages", "4", "--json"],
    ["spectrum", "--n", "8", "--stages", "3", "--method", "charpoly"],
    ["branches", "--stages", "3", "--grid", "30"],
    ["gmres", "--n", "15", "--seed", "3"],
    ["integrate", "--n", "5", "--steps", "3"],
    ["bound", "--n", "6", "--L", "5"],
])
def test_determinism(tmp_path, argv):
    a = run_cli(argv, tmp_path, "a")
    b = run_cli(argv, tmp_path, "b")
    assert a[0] == 0
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_unwritable_output(tmp_path):
    assert main(["pencil", "--out", str(tmp_path / "missing" / "x.csv")]) == 1


def test_stdout_and_module_entry():
    proc = subprocess.run([sys.executable, "-m", "irkprec", "pencil", "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("k,mu\n")
    proc = subprocess.run([sys.executable, "-m", "irkprec", "spectrum", "--stages", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 2


def test_formatting_helpers():
    assert fmt(0.1) == "0.10000000000000001"
    text = dumps_json({"a": [0.1, float("nan")], "b": True})
    assert text.endswith("}\n") and "0.10000000000000001" in text
    assert json.loads(text) == {"a": [0.1, None], "b": True}
