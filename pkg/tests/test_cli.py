import json
import subprocess
import sys

import pytest

from so5body.cli import main

REF = ["--lambdas", "5,4,3,2,1", "--c1", "2.5", "--c2", "4.25"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestSimulate:
    def test_equilibrium_run(self, capsys, tmp_path):
        csv_path = tmp_path / "t1.csv"
        code, out, _ = run(capsys, "simulate", *REF, "--init", "family:t1:slot=a,b",
                           "--dt", "1e-3", "--steps", "10000", "--stride", "1000",
                           "--csv", str(csv_path))
        assert code == 0
        rep = json.loads(out)
        assert rep["passed"] and max(rep["drift"].values()) <= 1e-14
        assert rep["initial"] == rep["final"]
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "t,x1,x2,x3,y1,y2,y3,z1,z2,z3,z4"
        assert len(lines) == 12

    def test_coords_run(self, capsys):
        coords = "0.3,-0.1,0.2,0.4,-0.25,0.1,0.05,-0.3,0.15,0.2"
        code, out, _ = run(capsys, "simulate", "--lambdas", "5,4,3,2,1",
                           "--init", f"coords:{coords}", "--steps", "2000")
        assert code == 0 and json.loads(out)["passed"]

    def test_drift_bound_failure(self, capsys):
        code, out, _ = run(capsys, "simulate", "--lambdas", "5,4,3,2,1", "--init", "random",
                           "--scale", "3", "--dt", "0.05", "--steps", "200",
                           "--drift-bound", "1e-15")
        assert code == 1 and not json.loads(out)["passed"]

    def test_continuous_init(self, capsys):
        code, out, _ = run(capsys, "simulate", "--lambdas", "5,4,3,2,1",
                           "--init", "family:s3:coef=1,0.5,-2", "--steps", "100")
        assert code == 0

    def test_missing_lambdas(self, capsys):
        code, _, err = run(capsys, "simulate", "--init", "random")
        assert code == 2 and "--lambdas" in err

    @pytest.mark.parametrize("init", ["family:t1", "family:t99:slot=a,b", "family:x1",
                                      "coords:1,2", "bogus", "family:t1:slot=a,a"])
    def test_bad_init(self, capsys, init):
        code, _, err = run(capsys, "simulate", *REF, "--init", init, "--steps", "1")
        assert code == 2 and "error" in err

    def test_bad_inertia(self, capsys):
        code, _, err = run(capsys, "simulate", "--lambdas", "1,1,2,3,4", "--steps", "1")
        assert code == 2 and "repeated" in err


class TestEquilibria:
    def test_full_catalog(self, capsys):
        code, out, _ = run(capsys, "equilibria", *REF)
        cat = json.loads(out)
        assert code == 0
        assert len(cat["points"]) == 120 and len(cat["continuous"]) == 10
        assert cat["max_residual"] <= 1e-12

    def test_filter(self, capsys):
        code, out, _ = run(capsys, "equilibria", *REF, "--families", "t1,t8,t12")
        assert code == 0 and len(json.loads(out)["points"]) == 24

    def test_irregular_orbit(self, capsys):
        code, _, err = run(capsys, "equilibria", "--lambdas", "5,4,3,2,1",
                           "--c1", "1", "--c2", "1")
        assert code == 2 and "2c2>c1^2>c2" in err

    def test_missing_orbit(self, capsys):
        code, _, err = run(capsys, "equilibria", "--lambdas", "5,4,3,2,1")
        assert code == 2 and "--c1" in err


class TestClassify:
    def test_table(self, capsys, tmp_path):
        out_path = tmp_path / "table.json"
        code, _, _ = run(capsys, "classify", *REF, "--out", str(out_path))
        assert code == 0
        rows = json.loads(out_path.read_text())["rows"]
        assert len(rows) == 30
        t2ba = next(r for r in rows if r["family"] == 2 and r["slot_class"] == "b,a")
        assert t2ba["status"] == "Open"
        assert t2ba["verdict"]["evidence"]["note"] == "the stability problem remains open"

    def test_expect_reports_the_two_disputed_rows(self, capsys):
        code, out, err = run(capsys, "classify", *REF, "--expect", "paper")
        exp = json.loads(out)["expect"]
        assert code == 1 and not exp["passed"]
        got = {(m["family"], m["slot_class"]) for m in exp["mismatches"]}
        assert got == {(2, "a,b"), (9, "a,b")}
        assert err.count("mismatch:") == 2

    def test_t6_equality_orbit_open(self, capsys):
        c2 = 2.5 ** 2 * (6 ** 4 + 8 ** 4) / 100 ** 2
        code, out, _ = run(capsys, "classify", "--lambdas", "5,4,3,2,1", "--c1", "2.5",
                           "--c2", repr(c2), "--families", "t6")
        rows = json.loads(out)["rows"]
        assert code == 0
        assert next(r for r in rows if r["slot_class"] == "a,b")["status"] == "Open"

    def test_unordered_lambdas(self, capsys):
        code, _, err = run(capsys, "classify", "--lambdas", "1,2,3,4,5",
                           "--c1", "2.5", "--c2", "4.25")
        assert code == 2 and "lambda_1 >" in err

    def test_bad_family_filter(self, capsys):
        code, _, _ = run(capsys, "classify", *REF, "--families", "t16")
        assert code == 2


class TestVerify:
    def test_default_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--samples", "20")
        rep = json.loads(out)
        assert code == 0 and rep["passed"]
        assert set(rep["suites"]) == {"generator-identity", "poisson-commutation",
                                      "two-path", "bracket-table"}

    def test_single_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "generator-identity",
                           "--n", "7", "--samples", "500")
        rep = json.loads(out)
        assert code == 0 and rep["suites"]["generator-identity"]["samples"] == 500

    def test_seed_determinism(self, capsys):
        outs = [run(capsys, "verify", "--seed", "42", "--samples", "10")[1] for _ in range(2)]
        assert outs[0] == outs[1] and outs[0].endswith("\n")

    def test_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("SO5_SEED", "42")
        env = run(capsys, "verify", "--samples", "10")[1]
        flag = run(capsys, "verify", "--seed", "42", "--samples", "10")[1]
        assert env == flag and json.loads(env)["seed"] == 42

    def test_bad_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("SO5_SEED", "abc")
        assert run(capsys, "verify", "--samples", "1")[0] == 2

    def test_bad_n(self, capsys):
        assert run(capsys, "verify", "--n", "1")[0] == 2


class TestIntegrals:
    def test_snapshot(self, capsys):
        code, out, _ = run(capsys, "integrals", *REF, "--init", "family:t1:slot=a,b")
        snap = json.loads(out)
        assert code == 0
        assert snap["C1"] == 2.5 and snap["C2"] == 4.25
        assert snap["H"] == pytest.approx(29 / 90, rel=1e-15)

    def test_seeded_random_deterministic(self, capsys):
        a = run(capsys, "integrals", "--lambdas", "5,4,3,2,1", "--init", "random", "--seed", "3")[1]
        b = run(capsys, "integrals", "--lambdas", "5,4,3,2,1", "--init", "random", "--seed", "3")[1]
        assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "so5body", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "so5body" in proc.stdout


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "so5body", "classify", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "--expect" in proc.stdout


def test_json_floats_seventeen_digits():
    from so5body.jsonio import dumps
    text = dumps({"x": 0.1, "y": 2.0, "z": float("inf"), "w": complex(1, -0.5)})
    assert '"x": 0.10000000000000001' in text and '"y": 2.0' in text
    data = json.loads(text)
    assert data["x"] == 0.1 and isinstance(data["y"], float) and data["z"] is None
    assert data["w"] == [1.0, -0.5]
