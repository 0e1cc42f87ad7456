import csv
import io
import json
import subprocess
import sys

import pytest

from pebblex.cli import EXIT_BUDGET, EXIT_OK, EXIT_PRECONDITION, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_json(capsys):
    code, out, _ = run(capsys, "solve", "--graph", "path:3", "--dist", "4,0,0")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["solvable"] is True and doc["n"] == 3


def test_solve_reports_witness(capsys):
    code, out, _ = run(capsys, "solve", "--graph", "path:3", "--dist", "1,0,0",
                       "--method", "bruteforce")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["solvable"] is False and doc["witness"] in (1, 2)


def test_solve_csv(capsys):
    code, out, _ = run(capsys, "solve", "--graph", "clique:3", "--dist", "0,1,1",
                       "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and rows[0]["solvable"] == "false"


def test_precondition_exit_code(capsys):
    code, _, err = run(capsys, "solve", "--graph", "path:3", "--dist", "1,0")
    assert code == EXIT_PRECONDITION and err.startswith("error:")
    code, _, _ = run(capsys, "solve", "--graph", "path:3", "--dist", "a,b,c")
    assert code == EXIT_PRECONDITION
    code, _, _ = run(capsys, "solve", "--graph", "bogus:3", "--dist", "1,0,0")
    assert code == EXIT_PRECONDITION


def test_sample_is_seeded(capsys):
    args = ("sample", "--n", "4", "--T", "6", "--count", "5", "--seed", "7")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b
    doc = json.loads(a)
    assert all(sum(r) == 6 for r in doc["samples"])


def test_sample_geometric_from_graph(capsys):
    code, out, _ = run(capsys, "sample", "--graph", "path:5", "--model", "geometric",
                       "--total", "3.5", "--count", "3", "--format", "csv")
    assert code == EXIT_OK and len(out.strip().splitlines()) == 4


def test_threshold_exact(capsys):
    code, out, _ = run(capsys, "threshold", "--at-least", "1,1", "--exact")
    assert code == EXIT_OK
    assert json.loads(out)["value"] == pytest.approx(2 / (2 ** 0.5 - 1))
    code, out, _ = run(capsys, "threshold", "--kind", "uniform", "--total-at-least", "2,3",
                       "--exact")
    assert json.loads(out)["value"] == 3


def test_threshold_mc(capsys):
    code, out, _ = run(capsys, "threshold", "--graph", "clique:2", "--budget", "200000",
                       "--rel-tol", "0.05")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["ci_low"] <= 2.0 <= doc["ci_high"]


def test_threshold_budget_exit_code(capsys):
    code, out, _ = run(capsys, "threshold", "--graph", "path:64", "--budget", "50",
                       "--rel-tol", "1e-4")
    assert code == EXIT_BUDGET and json.loads(out)["budget_exhausted"] is True


def test_threshold_needs_a_family(capsys):
    code, _, _ = run(capsys, "threshold", "--exact")
    assert code == EXIT_PRECONDITION


def test_shadow_verify(capsys):
    code, out, _ = run(capsys, "shadow", "verify", "--n", "2", "--T", "2")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["violations"] == [] and doc["cases"] > 0


def test_ydist(capsys):
    code, out, _ = run(capsys, "ydist", "--x", "1.0", "--n", "2", "--asymp", "8",
                       "--chi", "2", "0.5", "1")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["rows"][0]["cdf_Yn"] == pytest.approx(0.39957640089372803)
    assert doc["rows"][1]["method"].startswith("asymptotic")
    assert doc["chi"]["value"] == pytest.approx(3 / 8)
    code, _, _ = run(capsys, "ydist")
    assert code == EXIT_PRECONDITION


def test_experiment_lower_bound_csv_deterministic(capsys):
    args = ("experiment", "lower-bound", "--n", "100", "1000", "--budget", "20000",
            "--format", "csv")
    code, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert code == EXIT_OK and a == b
    assert a.splitlines()[0] == "source,n,p,q,q_above_half,sigma,z_score"


def test_experiment_spectrum_prints_knobs(capsys):
    code, out, err = run(capsys, "experiment", "spectrum", "--n", "4096", "--points", "3")
    assert code == EXIT_OK and "knobs: G0=3, L0=2" in err
    assert len(json.loads(out)["data"]) == 3


def test_experiment_writes_files(capsys, tmp_path):
    code, _, err = run(capsys, "experiment", "path", "--n", "16", "32", "--budget", "500",
                       "--rel-tol", "0.1", "--out", str(tmp_path))
    assert code in (EXIT_OK, EXIT_BUDGET)
    assert (tmp_path / "path.json").exists() and (tmp_path / "path.manifest.json").exists()
    assert "wrote" in err


def test_experiment_bouquet_knob_override(capsys):
    code, out, err = run(capsys, "experiment", "bouquet", "--instance", "256,1,3",
                         "--L0", "2", "--budget", "500", "--rel-tol", "0.1", "--format", "csv")
    assert "L0=2" in err
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["preconditions_ok"] == "true"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pebblex", "solve", "--graph", "path:2",
                           "--dist", "2,0"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["solvable"] is True


def test_argparse_usage_errors(capsys):
    with pytest.raises(SystemExit):
        main(["experiment", "nonsense"])
