import json
import shutil
import subprocess
from pathlib import Path

import pytest

from flatnorm import fixtures
from flatnorm.cli import run
from flatnorm.io import write_off
from flatnorm.records import SWEEP_COLUMNS, read_sweep_csv

DATA = Path(__file__).parent / "data"


def _run(capsys, *argv):
    code = run(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_msfn_record(capsys):
    code, rec = _run(capsys, "msfn", "--mesh", str(DATA / "square.off"), "--chain", str(DATA / "square_path.chain"),
                     "--lambda", "2")
    assert code == 0
    assert set(rec) == {"command", "inputs_digest", "outputs", "timing_ms"}
    out = rec["outputs"]
    assert out["flat_norm"]["exact"] == "2"
    assert out["solver_path"] == "LpOnly"
    assert out["x"] == [[[0, 1], 1], [[1, 2], 1]]
    assert len(rec["inputs_digest"]) == 64


def test_records_are_deterministic(capsys, tmp_path):
    argv = ["--no-timing", "msfn", "--mesh", str(DATA / "moebius.off"), "--chain",
            str(DATA / "moebius_regression.chain"), "--lambda", "0", "--weights", "unit"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["--out", str(a)] + argv) == 0
    assert run(["--out", str(b)] + argv) == 0
    assert a.read_bytes() == b.read_bytes()
    rec = json.loads(a.read_text())
    assert rec["timing_ms"] is None
    assert rec["outputs"]["solver_path"] == "BranchAndBound"
    assert rec["outputs"]["lp_objective"]["exact"] == "5/2"
    assert rec["outputs"]["flat_norm"]["exact"] == "3"


def test_digest_changes_with_parameters(capsys):
    base = ["--no-timing", "msfn", "--mesh", str(DATA / "square.off"), "--chain", str(DATA / "square_path.chain")]
    _, r1 = _run(capsys, *base, "--lambda", "2")
    _, r2 = _run(capsys, *base, "--lambda", "3")
    assert r1["inputs_digest"] != r2["inputs_digest"]


def test_sweep_csv(capsys, tmp_path):
    csv_path = tmp_path / "sweep.csv"
    code, rec = _run(capsys, "sweep", "--mesh", "fixture:square", "--chain", str(DATA / "square_path.chain"),
                     "--lambda-range", "0:4:17", "--csv", str(csv_path))
    assert code == 0
    rows = read_sweep_csv(csv_path.read_text())
    assert len(rows) == 17 == len(rec["outputs"]["results"])
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert [r["F"] for r in rows] == sorted(r["F"] for r in rows)
    bp, = rec["outputs"]["breakpoints"]
    assert bp["crossing"]["decimal"] == pytest.approx(1.1715728752538, rel=1e-9)


def test_certify_moebius_off(capsys):
    code, rec = _run(capsys, "certify-tu", "--mesh", str(DATA / "moebius.off"))
    assert code == 0
    out = rec["outputs"]
    assert out["verdict"] == "NotTU"
    assert abs(out["det"]) >= 2
    code, rec = _run(capsys, "certify-tu", "--mesh", str(DATA / "tetra_boundary.off"))
    assert rec["outputs"]["verdict"] == "TU"


def test_regularity_and_bounds(capsys):
    code, rec = _run(capsys, "regularity", "--mesh", "fixture:triangle", "--full")
    assert code == 0
    assert rec["outputs"]["theta"] == pytest.approx(52.76, abs=5e-3)
    assert len(rec["outputs"]["per_simplex"]) == 4
    code, rec = _run(capsys, "bounds", "--mesh", "fixture:cube", "--mass-t", "1", "--mass-bdt", "1")
    assert code == 0
    assert rec["outputs"]["comparison"]["ours_strictly_smaller"] is True


def test_retract_and_refine(capsys, tmp_path):
    mesh = tmp_path / "eq.off"
    write_off(fixtures.equilateral_mesh(2, edge=2.0), mesh)
    code, rec = _run(capsys, "retract", "--mesh", str(mesh), "--curve", str(DATA / "square.curve"))
    assert code == 0
    assert rec["outputs"]["within_bound"] is True
    code, rec = _run(capsys, "refine-study", "--mesh", str(mesh), "--curve", str(DATA / "square.curve"),
                     "--levels", "2")
    assert code == 0
    assert len(rec["outputs"]["rows"]) == 3


def test_gen_pyramid_then_solve(capsys, tmp_path):
    stem = tmp_path / "pyr"
    code, rec = _run(capsys, "gen-pyramid", "--n", "4", "--stem", str(stem))
    assert code == 0
    assert rec["outputs"]["surface_triangles"] == 18
    code, rec = _run(capsys, "msfn", "--mesh", str(stem), "--chain", str(stem.with_suffix(".chain")),
                     "--lambda", "6")
    assert code == 0
    out = rec["outputs"]
    assert out["x_mass"] == out["input_mass"]


def test_exit_codes(capsys, tmp_path):
    code, rec = _run(capsys, "msfn", "--mesh", str(tmp_path / "missing.off"), "--chain", "x", "--lambda", "1")
    assert code == 2 and "error" in rec
    bad = tmp_path / "bad.chain"
    bad.write_text("0 1 0.5\n")
    code, rec = _run(capsys, "msfn", "--mesh", "fixture:square", "--chain", str(bad), "--lambda", "1")
    assert code == 2 and rec["error"]["type"] == "NonIntegerCoefficient"
    code, rec = _run(capsys, "msfn", "--mesh", "fixture:square")
    assert code == 2
    big = tmp_path / "big.chain"
    big.write_text("0 1 3\n")
    code, rec = _run(capsys, "msfn", "--mesh", "fixture:square", "--chain", str(big), "--lambda", "1",
                     "--cap-multiplicity")
    assert code == 3 and rec["error"]["type"] == "InfeasibleProblem"
    code, rec = _run(capsys, "msfn", "--mesh", "fixture:square", "--dim", "5", "--chain", str(big), "--lambda", "1")
    assert code in (2, 4)


@pytest.mark.skipif(shutil.which("flatnorm") is None, reason="console script not installed")
def test_console_script(tmp_path):
    proc = subprocess.run(["flatnorm", "--no-timing", "certify-tu", "--mesh", "fixture:moebius"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["outputs"]["verdict"] == "NotTU"
