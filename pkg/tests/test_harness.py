import json
import subprocess
import sys

import numpy as np
import pytest

from starkqfi.harness import ConfigError, load_config, run
from starkqfi.harness import runner as runner_mod
from starkqfi.harness.config import parse_config_file
from starkqfi.harness.csvio import read_csv, write_csv


def small_eq_overrides(out):
    return {
        "a": "0.1",
        "L": "4,6",
        "h_min": "1e-3",
        "h_max": "1",
        "h_count": "4",
        "selector": "ground",
        "out": str(out),
        "workers": "1",
    }


class TestConfig:
    def test_range_syntax(self):
        cfg = load_config("gap-scan", overrides={"a": "0.1", "L": "50:70:10",
                                                 "out": "x"})
        assert cfg.L == (50, 60, 70)

    def test_comma_lists(self):
        cfg = load_config("bound-check", overrides={"a": "0.02,0.04", "L": "8,10"})
        assert cfg.a == (0.02, 0.04)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            load_config("eq-sweep", overrides={"a": "0.1", "L": "4", "banana": "1"})

    def test_empty_grid_rejected(self):
        with pytest.raises(ConfigError):
            load_config("eq-sweep", overrides={"a": "", "L": "4"})

    def test_bad_field_grid_rejected(self):
        with pytest.raises(ConfigError):
            load_config("eq-sweep", overrides={"a": "0.1", "L": "4",
                                               "h_min": "1", "h_max": "0.1"})

    def test_odd_mb_size_rejected(self):
        with pytest.raises(ConfigError, match="even"):
            load_config("eq-sweep", overrides={"a": "0.1", "L": "5", "probe": "mb"})

    def test_dyn_transition_scan_needs_sp(self):
        with pytest.raises(ConfigError, match="single-particle"):
            load_config("dyn-transition-scan",
                        overrides={"a": "0.1", "L": "6", "probe": "mb"})

    def test_file_plus_override(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("a = 0.1\nL = 4\nh_count = 3  # comment\n")
        cfg = load_config("eq-sweep", config_file=cfg_file,
                          overrides={"h_count": "5"})
        assert cfg.h_count == 5
        assert parse_config_file(cfg_file)["h_count"] == "3"


class TestRunner:
    def test_eq_sweep_outputs(self, tmp_path):
        cfg = load_config("eq-sweep", overrides=small_eq_overrides(tmp_path))
        outcome = run(cfg)
        assert outcome.exit_code == 0
        header, rows = read_csv(tmp_path / "eq_sweep.csv")
        assert header == ["probe", "L", "a", "h", "qfi", "method"]
        assert len(rows) == 8
        manifest = json.loads(outcome.manifest_path.read_text())
        assert all(p["status"] == "ok" for p in manifest["points"])
        assert manifest["config"]["h_count"] == 4

    def test_determinism_same_config(self, tmp_path):
        overrides = small_eq_overrides(tmp_path / "r1")
        run(load_config("eq-sweep", overrides=overrides))
        overrides["out"] = str(tmp_path / "r2")
        run(load_config("eq-sweep", overrides=overrides))
        b1 = (tmp_path / "r1" / "eq_sweep.csv").read_bytes()
        b2 = (tmp_path / "r2" / "eq_sweep.csv").read_bytes()
        assert b1 == b2

    def test_worker_counts_identical(self, tmp_path):
        overrides = small_eq_overrides(tmp_path / "w1")
        run(load_config("eq-sweep", overrides=overrides))
        overrides.update(out=str(tmp_path / "w2"), workers="2")
        run(load_config("eq-sweep", overrides=overrides))
        b1 = (tmp_path / "w1" / "eq_sweep.csv").read_bytes()
        b2 = (tmp_path / "w2" / "eq_sweep.csv").read_bytes()
        assert b1 == b2

    def test_crash_containment(self, tmp_path, monkeypatch):
        # one failing grid point must not abort the sweep
        real = runner_mod.ex.eq_qfi

        def flaky(probe, L, a, h, selector, method):
            if L == 6 and h > 0.5:
                raise RuntimeError("synthetic point failure")
            return real(probe, L, a, h, selector, method)

        monkeypatch.setattr(runner_mod.ex, "eq_qfi", flaky)
        cfg = load_config("eq-sweep", overrides=small_eq_overrides(tmp_path))
        outcome = run(cfg)
        assert outcome.exit_code == 0
        assert outcome.n_failed == 1 and outcome.n_ok == 7
        manifest = json.loads(outcome.manifest_path.read_text())
        bad = [p for p in manifest["points"] if p["status"] == "error"]
        assert len(bad) == 1 and "synthetic point failure" in bad[0]["reason"]
        _, rows = read_csv(tmp_path / "eq_sweep.csv")
        assert len(rows) == 7

    def test_all_points_failed_exit_code(self, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise RuntimeError("nope")

        monkeypatch.setattr(runner_mod.ex, "eq_qfi", broken)
        cfg = load_config("eq-sweep", overrides=small_eq_overrides(tmp_path))
        assert run(cfg).exit_code == 2

    def test_bound_check_rows(self, tmp_path):
        cfg = load_config("bound-check", overrides={
            "a": "0.04", "L": "20,40", "out": str(tmp_path), "workers": "1"})
        run(cfg)
        _, rows = read_csv(tmp_path / "bound_check.csv")
        assert [r["ok"] for r in rows] == ["true", "true"]

    def test_gap_scan(self, tmp_path):
        cfg = load_config("gap-scan", overrides={
            "a": "0.05", "L": "10,20", "out": str(tmp_path), "workers": "1"})
        run(cfg)
        _, rows = read_csv(tmp_path / "gap_scan.csv")
        gaps = [float(r["gap"]) for r in rows]
        assert gaps[0] > gaps[1] > 0

    def test_dyn_sweep_aggregate(self, tmp_path):
        cfg = load_config("dyn-sweep", overrides={
            "a": "0.05", "L": "8", "h_min": "0.01", "h_max": "0.1", "h_count": "2",
            "t_min": "0", "t_max": "1000", "out": str(tmp_path), "workers": "1",
            "emit_series": "false"})
        run(cfg)
        _, rows = read_csv(tmp_path / "dyn_sweep.csv")
        assert rows[0]["fom_kind"] == "qfi_avg"
        assert float(rows[0]["fom"]) > 0


class TestFitSubcommand:
    def test_group_fits_and_meta(self, tmp_path):
        rows = []
        for a in (0.02, 0.03, 0.04):
            for L in (10, 20, 30, 40):
                rows.append(dict(a=a, L=L, qfi=float(np.exp((2 * a + 0.01) * L))))
        src = write_csv(tmp_path / "data.csv", ["a", "L", "qfi"], rows)
        cfg = load_config("fit", overrides={
            "input": str(src), "fit_kind": "exp-L", "fit_y": "qfi",
            "out": str(tmp_path)})
        outcome = runner_mod.run_fit(cfg)
        assert outcome.exit_code == 0
        _, fit_rows = read_csv(tmp_path / "fits.csv")
        groups = {r["group"]: float(r["slope"]) for r in fit_rows}
        assert groups["0.02"] == pytest.approx(0.05, abs=1e-10)
        meta = [r for r in fit_rows if r["group"] == "meta"][0]
        assert float(meta["slope"]) == pytest.approx(2.0, abs=1e-9)
        assert float(meta["intercept"]) == pytest.approx(0.01, abs=1e-10)
        assert meta["kind"] == "exp-L-meta"

    def test_missing_column_rejected(self, tmp_path):
        src = write_csv(tmp_path / "data.csv", ["a", "L"], [dict(a=0.1, L=10)])
        cfg = load_config("fit", overrides={
            "input": str(src), "fit_kind": "exp-L", "fit_y": "qfi",
            "out": str(tmp_path)})
        with pytest.raises(ConfigError, match="qfi"):
            runner_mod.run_fit(cfg)

    def test_single_row_group_rejected(self, tmp_path):
        src = write_csv(tmp_path / "data.csv", ["a", "L", "qfi"],
                        [dict(a=0.1, L=10, qfi=2.0)])
        cfg = load_config("fit", overrides={
            "input": str(src), "fit_kind": "exp-L", "fit_y": "qfi",
            "out": str(tmp_path)})
        with pytest.raises(ValueError, match="3 points"):
            runner_mod.run_fit(cfg)


class TestCli:
    def _run(self, *args):
        return subprocess.run([sys.executable, "-m", "starkqfi.harness.cli", *args],
                              capture_output=True, text=True)

    def test_happy_path(self, tmp_path):
        r = self._run("eq-sweep", "--a", "0.1", "--L", "4", "--h-min", "0.01",
                      "--h-max", "0.1", "--h-count", "2", "--out", str(tmp_path),
                      "--workers", "1")
        assert r.returncode == 0
        assert (tmp_path / "eq_sweep.csv").exists()

    def test_config_error_exit_one(self, tmp_path):
        r = self._run("eq-sweep", "--a", "0.1", "--L", "4", "--bad-key", "1",
                      "--out", str(tmp_path))
        assert r.returncode == 1
        assert "configuration error" in r.stderr

    def test_missing_value_exit_one(self):
        r = self._run("eq-sweep", "--a")
        assert r.returncode == 1
