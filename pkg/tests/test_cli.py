import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from bos.cli import main, parse_grid, parse_sweep, read_config


def _report(path):
    return json.loads(path.read_text())


class TestParsing:
    def test_sweep(self):
        name, vals = parse_sweep("a=0:0.4:0.05")
        assert name == "a" and len(vals) == 9 and vals[-1] == pytest.approx(0.4)

    @pytest.mark.parametrize("text", ["a=0:1", "c=0:1:0.1", "a=1:0:0.1", "a=0:1:0"])
    def test_bad_sweep(self, text):
        with pytest.raises(ValueError):
            parse_sweep(text)

    def test_grid(self):
        assert parse_grid("0,1;0.3,1.0") == [(0.0, 1.0), (0.3, 1.0)]
        assert parse_grid("") == []

    def test_config_file(self, tmp_path):
        f = tmp_path / "c.cfg"
        f.write_text("# comment\na = 0.3\nn-list = 16,32  # trailing\n\n")
        assert read_config(f) == {"a": "0.3", "n_list": "16,32"}


class TestCommands:
    def test_factor_check(self, tmp_path, capsys):
        assert main(["--out", str(tmp_path), "factor-check", "--a", "0.3", "--b", "1.0", "--n", "64"]) == 0
        rep = _report(tmp_path / "factor_check.report.json")
        assert rep["schema_version"] == 1 and rep["passed"]
        names = [c["name"] for c in rep["checks"]]
        assert any("factorization residual" in n for n in names)
        assert "[PASS]" in capsys.readouterr().out

    def test_regime_violation_exit_2(self, tmp_path, capsys):
        assert main(["--out", str(tmp_path), "assemble", "--a", "0.5", "--b", "1.5"]) == 2
        err = json.loads(capsys.readouterr().err)["error"]
        assert err["code"] == "regime-violation" and err["kind"] == "invalid-config"
        assert _report(tmp_path / "assemble.report.json")["error"]["code"] == "regime-violation"

    def test_assemble_csv(self, tmp_path):
        assert main(["--out", str(tmp_path), "assemble", "--a", "0.3", "--n", "4", "--kind", "M"]) == 0
        rows = list(csv.DictReader(open(tmp_path / "assemble.csv")))
        assert rows[0].keys() == {"kind", "m", "n", "re", "im"}
        # tridiagonal on 9 modes, no vanishing band entries at a = 0.3
        assert len(rows) == 9 + 8 + 8

    def test_near_eigenvalue_exit_3(self, tmp_path, capsys):
        assert main(["--out", str(tmp_path), "resolvent", "--n", "8", "--lam", "0"]) == 3
        err = json.loads(capsys.readouterr().err)["error"]
        assert err["kind"] == "numerical-failure" and err["type"] == "NearEigenvalueError"

    def test_resolvent_complex_shift(self, tmp_path):
        assert main(["--out", str(tmp_path), "resolvent", "--a", "0.3", "--n", "16", "--lam", "2+1i"]) == 0

    def test_minverse(self, tmp_path):
        assert main(["--out", str(tmp_path), "minverse", "--a", "0.2", "--b", "1.2", "--points", "21"]) == 0
        rep = _report(tmp_path / "minverse.report.json")
        assert rep["results"]["y0"]["limit_zero"] == pytest.approx(1 / 0.8)

    def test_hs_norm(self, tmp_path):
        assert main(["--out", str(tmp_path), "hs-norm", "--n-list", "16,32,64"]) == 0
        rows = list(csv.reader(open(tmp_path / "hs_norm.csv")))
        assert rows[0] == ["N", "hs_norm"] and len(rows) == 4

    def test_evolve_and_growth(self, tmp_path):
        assert main(["--out", str(tmp_path), "evolve", "--n", "16", "--init", "mode:1", "--scheme", "modal"]) == 0
        assert main(["--out", str(tmp_path), "growth", "--n-list", "8,16", "--t-max", "1"]) == 0
        assert _report(tmp_path / "growth.report.json")["passed"]

    def test_spectrum(self, tmp_path):
        assert main(["--out", str(tmp_path), "spectrum", "--a", "0", "--b", "1", "--n", "32", "--k", "4"]) == 0
        rows = list(csv.DictReader(open(tmp_path / "spectrum.csv")))
        assert len(rows) == 4 and all(r["converged"] == "1" for r in rows)
        names = [c["name"] for c in _report(tmp_path / "spectrum.report.json")["checks"]]
        assert any("max |Re lambda|" in n for n in names)

    def test_spectrum_sweep(self, tmp_path):
        args = ["--out", str(tmp_path), "spectrum", "--n", "32", "--k", "2", "--sweep", "a=0:0.05:0.05", "--jobs", "2"]
        assert main(args) == 0
        index = json.loads((tmp_path / "spectrum_index.json").read_text())
        assert [p["a"] for p in index] == [0.0, 0.05]
        assert all(Path(p["file"]).exists() for p in index)

    def test_json_format(self, tmp_path):
        assert main(["--out", str(tmp_path), "--format", "json", "hs-norm", "--n-list", "16,32"]) == 0
        data = json.loads((tmp_path / "hs_norm.json").read_text())
        assert data["columns"] == ["N", "hs_norm"]

    def test_out_file(self, tmp_path):
        target = tmp_path / "sub" / "h.csv"
        assert main(["hs-norm", "--n-list", "16,32", "--out", str(target)]) == 0
        assert target.exists() and (tmp_path / "sub" / "h.report.json").exists()


class TestConfigAndErrors:
    def test_config_overridden_by_flags(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("a = 0.3\nn = 32\n")
        assert main(["--config", str(cfg), "--out", str(tmp_path), "factor-check", "--n", "16"]) == 0
        conf = _report(tmp_path / "factor_check.report.json")["config"]
        assert conf["a"] == 0.3 and conf["n"] == 16

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("bogus = 1\n")
        assert main(["--config", str(cfg), "factor-check"]) == 2
        assert "bogus" in json.loads(capsys.readouterr().err)["error"]["message"]

    def test_empty_grid(self, tmp_path):
        assert main(["--out", str(tmp_path), "verify-all", "--grid", ""]) == 2

    def test_usage_error(self, capsys):
        assert main(["spectrum", "--k", "many"]) == 2
        assert json.loads(capsys.readouterr().err)["error"]["kind"] == "invalid-config"

    def test_check_failure_exit_1(self, tmp_path):
        # no eigenvalue can be stable to 1e-30, so the convergence check fails
        args = ["--out", str(tmp_path), "spectrum", "--n", "32", "--k", "2", "--tol", "1e-30"]
        assert main(args) == 1
        rep = _report(tmp_path / "spectrum.report.json")
        assert not rep["passed"] and rep["error"] is None


class TestDeterminism:
    def test_bit_identical_outputs(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        args = ["--out", str(tmp_path), "--seed", "7", "factor-check", "--a", "0.2", "--b", "1.2", "--n", "16"]
        main(args)
        first = [(tmp_path / f).read_bytes() for f in ("factor_check.csv", "factor_check.report.json")]
        main(args)
        second = [(tmp_path / f).read_bytes() for f in ("factor_check.csv", "factor_check.report.json")]
        assert first == second
        assert _report(tmp_path / "factor_check.report.json")["timestamp"] == "2023-11-14T22:13:20Z"

    def test_verify_all_subset(self, tmp_path):
        assert main(["--out", str(tmp_path), "verify-all", "--criteria", "1,4,10"]) == 0
        rep = _report(tmp_path / "verify_all.report.json")
        assert rep["results"]["criteria"] == {"1": True, "4": True, "10": True}


def test_console_script(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "bos.cli", "--out", str(tmp_path), "assemble", "--n", "4"],
        capture_output=True, text=True, check=False,
    )
    assert out.returncode == 0, out.stderr
    assert (tmp_path / "assemble.report.json").exists()
