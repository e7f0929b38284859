import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from eelkit import check_lambda_cone, example_curve_3d, read_csv
from eelkit.cli import main


@pytest.fixture
def run(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("EELKIT_THREADS", raising=False)
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, [str(a) for a in args], env=env, catch_exceptions=False)

    return invoke


def test_help_lists_commands(run):
    res = run("--help")
    assert res.exit_code == 0
    for cmd in ("construct", "check", "bound", "certify", "export"):
        assert cmd in res.output


def test_construct_helix_auto_mu(run, tmp_path):
    res = run("construct", "helix", "--r", 1, "--mu", "auto", "--turns", 2, "-o", tmp_path)
    assert res.exit_code == 0, res.output
    meta = json.loads((tmp_path / "helix.meta.json").read_text())
    assert meta["mu"] == pytest.approx(0.4661)
    c = read_csv(tmp_path / "helix.csv")
    assert c.params[-1] == pytest.approx(4 * math.pi)
    assert meta["samples"] == len(c)


def test_check_exit_codes(run, tmp_path):
    run("construct", "example3d", "-o", tmp_path)
    path = tmp_path / "example3d.csv"
    res = run("check", "lambda-curve", "--lambda", 0.99, path)
    assert res.exit_code == 1
    rep = json.loads(res.stdout)
    assert rep["property"] == "lambda_curve" and not rep["passed"]
    assert len(rep["witness"]) == 3
    assert "FAIL" in res.stderr
    res = run("check", "lambda-cone", "--lambda", 0.9, path)
    assert res.exit_code == 0
    assert run("check", "lambda-cone", "--lambda", 1.5, path).exit_code == 2
    assert run("check", "lambda-cone", path, "--tol", 0).exit_code == 2


def test_check_gd_is_self_contracted(run, tmp_path):
    assert run("construct", "gradient-descent", "-o", tmp_path).exit_code == 0
    res = run("check", "self-contracted", tmp_path / "gd_traj.csv")
    assert res.exit_code == 0, res.output


def test_check_secant_option(run, tmp_path):
    run("construct", "helix", "--mu", 0.47, "--step", 0.3, "-o", tmp_path)
    path = tmp_path / "helix.csv"
    res = run("check", "lambda-cone", "--lambda", 0.5, "--secant", "incoming", path)
    rep = json.loads(res.stdout)
    assert "incoming secants" in rep["notes"]


def test_lambda_token(run, tmp_path):
    run("construct", "helix", "--mu", 0.47, "--step", 0.1, "-o", tmp_path)
    res = run("check", "lambda-cone", "--lambda", "1/sqrt5", tmp_path / "helix.csv")
    assert json.loads(res.stdout)["lambda"] == 1 / math.sqrt(5)
    res = run("check", "lambda-cone", "--lambda", "1/sqrt(5)", tmp_path / "helix.csv")
    assert json.loads(res.stdout)["lambda"] == 1 / math.sqrt(5)
    assert run("check", "lambda-cone", "--lambda", "half", tmp_path / "helix.csv").exit_code == 2


def test_malformed_csv_reports_line(run, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x1,x2\n0,0,0\n1,oops,0\n")
    res = run("check", "self-expanded", bad)
    assert res.exit_code == 2
    assert "line 3" in res.stderr
    assert run("check", "self-expanded", tmp_path / "missing.csv").exit_code == 2


def test_round_trip_matches_in_memory(run, tmp_path):
    run("construct", "example3d", "-o", tmp_path)
    res = run("check", "lambda-cone", "--lambda", 0.87, tmp_path / "example3d.csv")
    assert json.loads(res.stdout) == check_lambda_cone(example_curve_3d(), 0.87).to_dict()


def test_outputs_are_byte_identical(run, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run("construct", "cylinder-eel", "--n", 1, "--step", 0.05, "-o", d).exit_code == 0
    assert (a / "cylinder_eel.csv").read_bytes() == (b / "cylinder_eel.csv").read_bytes()
    assert (a / "cylinder_eel.meta.json").read_bytes() == (b / "cylinder_eel.meta.json").read_bytes()
    r1 = run("check", "conical-split", "--lambda", 0.4, a / "cylinder_eel.csv", "--threads", 1)
    r2 = run("check", "conical-split", "--lambda", 0.4, a / "cylinder_eel.csv", env={"EELKIT_THREADS": "3"})
    assert r1.stdout == r2.stdout


def test_threads_env_validation(run, tmp_path):
    run("construct", "helix", "--step", 0.5, "-o", tmp_path)
    res = run("check", "lambda-curve", tmp_path / "helix.csv", env={"EELKIT_THREADS": "0"})
    assert res.exit_code == 2


def test_cylinder_eel_preconditions(run, tmp_path):
    assert run("construct", "cylinder-eel", "--n", 2, "-o", tmp_path).exit_code == 2
    assert run("construct", "cylinder-eel", "--r", 0.1, "--n", 1, "-o", tmp_path).exit_code == 2


def test_infinite_eel_over_budget_writes_plan(run, tmp_path):
    res = run("construct", "infinite-eel", "--stages", 3, "-o", tmp_path)
    assert res.exit_code == 2
    assert "samples" in res.stderr
    meta = json.loads((tmp_path / "infinite_eel.meta.json").read_text())
    assert meta["length"] >= 3
    assert meta["max_norm"] <= 1
    assert meta["stages"] == 3


def test_infinite_eel_plan_only(run, tmp_path):
    res = run("construct", "infinite-eel", "--stages", 2, "--plan-only", "-o", tmp_path)
    assert res.exit_code == 0
    assert json.loads(res.stdout)["pieces"] > 0


def test_bound(run, tmp_path):
    res = run("bound", "--lambda", 0, "--d", 2, "--diam", 1)
    assert res.exit_code == 0
    assert json.loads(res.stdout)["bound"] == pytest.approx(12.73, abs=5e-3)
    res = run("bound", "--lambda", 0.5, "--d", 2, "--diam", 1)
    assert res.exit_code == 2 and "1/d" in res.stderr
    assert run("bound", "--lambda", 0).exit_code == 2
    run("construct", "helix", "--mu", 0.47, "--step", 0.05, "-o", tmp_path)
    res = run("bound", "--lambda", 0, tmp_path / "helix.csv")
    assert res.exit_code == 0
    rep = json.loads(res.stdout)
    assert rep["length"] <= rep["bound"] and rep["slack"] > 0


def test_bound_refuses_non_lambda_curve(run, tmp_path):
    run("construct", "example3d", "--step", 0.1, "-o", tmp_path)
    res = run("bound", "--lambda", 0.2, tmp_path / "example3d.csv")
    assert res.exit_code == 1
    assert "refused" in res.stderr


def test_certify(run, tmp_path):
    res = run("certify", "big_cylinder", "--mu", "auto", "--grid", "1e3")
    assert res.exit_code == 0
    assert json.loads(res.stdout)["certified"]
    res = run("certify", "helix_self_expanded", "--mu", 0.1)
    assert res.exit_code == 1
    assert json.loads(res.stdout)["max_violation"] > 0
    res = run("certify", "z_axis", "--mu", "auto", "--report", tmp_path / "z.json")
    rec = json.loads((tmp_path / "z.json").read_text())
    assert -rec["max_violation"] == pytest.approx(0.0586, abs=1e-3)
    assert run("certify", "no_such_lemma").exit_code == 2
    assert run("certify", "z_axis", "--grid", "1.5").exit_code == 2


def test_export(run, tmp_path):
    run("construct", "helix", "--mu", 0.47, "--step", 0.2, "-o", tmp_path)
    res = run("export", "widths", tmp_path / "helix.csv", "--lambda", 0)
    assert res.exit_code == 0
    lines = res.stdout.splitlines()
    assert lines[0].startswith("t,W_1") and lines[0].endswith("W_F")
    W = np.array([[float(x) for x in row.split(",")] for row in lines[1:]])
    assert np.all(np.diff(W[:, -1]) >= 0)
    assert run("export", "widths", tmp_path / "helix.csv", "--lambda", 0.4).exit_code == 2
    res = run("export", "params", "-o", tmp_path / "p.json")
    assert json.loads((tmp_path / "p.json").read_text())["N"] == 8
