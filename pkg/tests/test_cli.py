import json
import subprocess
import sys
from pathlib import Path

import pytest

from stovaq.cli import main
from stovaq.config import load, validate
from stovaq.scenarios import SCHEMAS


def write_cfg(tmp_path, text, name="cfg.txt"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestConfigParsing:
    def test_key_value_format(self, tmp_path):
        p = write_cfg(tmp_path, "# demo\nscenario = entropy_demo\nseed = 5\ngrid_n = 32\n")
        cfg = load(p)
        assert cfg == {"scenario": "entropy_demo", "seed": 5, "grid_n": 32}

    def test_json_format(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"scenario": "entropy_demo", "seed": 5}))
        assert load(p)["seed"] == 5

    def test_missing_file(self, tmp_path):
        from stovaq.config import ConfigError

        with pytest.raises(ConfigError):
            load(tmp_path / "nope.txt")

    def test_malformed_line(self, tmp_path):
        from stovaq.config import ConfigError

        with pytest.raises(ConfigError):
            load(write_cfg(tmp_path, "scenario entropy_demo\n"))


class TestValidate:
    def test_missing_seed_named(self):
        _, errors = validate({"scenario": "entropy_demo"}, SCHEMAS)
        assert any("seed" in e and "missing" in e for e in errors)

    def test_negative_nu_cites_invariant(self):
        cfg = {"scenario": "free_packet", "seed": 1, "nu": -0.5}
        _, errors = validate(cfg, SCHEMAS)
        assert any("nu" in e and "positive" in e for e in errors)

    def test_kappa_constraint_violation(self):
        cfg = {"scenario": "free_packet", "seed": 1, "kappa": 1.0, "alpha": 0.5, "m": 1.0, "nu": 0.9}
        _, errors = validate(cfg, SCHEMAS)
        assert any("4*alpha*nu*m" in e for e in errors)

    def test_nu_derived_when_omitted(self):
        cfg, errors = validate({"scenario": "free_packet", "seed": 1, "kappa": 2.0}, SCHEMAS)
        assert not errors
        assert cfg["nu"] == pytest.approx(2.0 / (4 * 0.5 * 1.0))

    def test_unknown_key_flagged(self):
        _, errors = validate({"scenario": "entropy_demo", "seed": 1, "wat": 3}, SCHEMAS)
        assert any("wat" in e for e in errors)

    def test_unknown_scenario(self):
        _, errors = validate({"scenario": "warp_drive", "seed": 1}, SCHEMAS)
        assert any("warp_drive" in e for e in errors)


class TestCliProcess:
    def test_list_scenarios(self, capsys):
        assert main(["list-scenarios"]) == 0
        out = capsys.readouterr().out.split()
        assert out == sorted(
            ["coherent_oscillator", "free_packet", "stationary_state", "entropy_demo", "field_ground"]
        )

    def test_validate_ok(self, tmp_path, capsys):
        p = write_cfg(tmp_path, "scenario = entropy_demo\nseed = 3\n")
        assert main(["validate", "--config", p]) == 0

    def test_validate_exit_2(self, tmp_path):
        p = write_cfg(tmp_path, "scenario = entropy_demo\n")
        assert main(["validate", "--config", p]) == 2

    def test_kappa_violation_exit_2(self, tmp_path):
        p = write_cfg(tmp_path, "scenario = free_packet\nseed = 1\nnu = 0.9\n")
        assert main(["run", "--config", p, "--out", str(tmp_path / "o")]) == 2

    def test_run_writes_report_and_csv(self, tmp_path, capsys):
        p = write_cfg(tmp_path, "scenario = entropy_demo\nseed = 3\ngrid_n = 48\n")
        out = tmp_path / "out"
        assert main(["run", "--config", p, "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["all_pass"] is True
        assert report["csv_files"] == ["iterations.csv"]
        header = (out / "iterations.csv").read_text().splitlines()[0]
        assert header == "iteration,entropy,ratio_spread,update_norm"
        for metric in report["metrics"]:
            assert {"name", "value", "tolerance", "comparator", "pass"} <= metric.keys()

    def test_numerical_failure_exit_3(self, tmp_path):
        # iteration cap too small for convergence: clean numerics error
        p = write_cfg(tmp_path, "scenario = entropy_demo\nseed = 3\nmax_iter = 2\n")
        assert main(["run", "--config", p, "--out", str(tmp_path / "o")]) == 3

    def test_rerun_byte_identical(self, tmp_path):
        p = write_cfg(tmp_path, "scenario = field_ground\nseed = 31\nsamples = 5000\nchains = 100\n")
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", p, "--out", str(a)]) == 0
        assert main(["run", "--config", p, "--out", str(b)]) == 0
        for name in ("report.json", "modes.csv", "covariance.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    @pytest.mark.parametrize(
        "cfg_text",
        [
            "scenario = entropy_demo\nseed = 5\ngrid_n = 48\n",
            "scenario = stationary_state\nseed = 5\ngrid_n = 256\nlevels = 3\nevolve_steps = 100\n",
            "scenario = free_packet\nseed = 5\ngrid_n = 256\nsteps = 192\n",
        ],
        ids=["entropy_demo", "stationary_state", "free_packet"],
    )
    def test_every_scenario_reruns_identically(self, tmp_path, cfg_text):
        p = write_cfg(tmp_path, cfg_text)
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", p, "--out", str(a)]) in (0, 1)
        assert main(["run", "--config", p, "--out", str(b)]) in (0, 1)
        for f in sorted(a.iterdir()):
            assert f.read_bytes() == (b / f.name).read_bytes()

    def test_thread_env_does_not_change_results(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("scenario = field_ground\nseed = 13\nsamples = 4000\nchains = 80\n")
        outs = []
        for threads, out in (("1", tmp_path / "t1"), ("2", tmp_path / "t2")):
            import os

            env = dict(os.environ, STOVAQ_THREADS=threads)
            r = subprocess.run(
                [sys.executable, "-m", "stovaq.cli", "run", "--config", str(cfg), "--out", str(out)],
                env=env,
                capture_output=True,
                text=True,
            )
            assert r.returncode == 0, r.stderr
            outs.append((out / "covariance.csv").read_bytes())
        assert outs[0] == outs[1]
