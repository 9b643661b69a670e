"""Command-line interface: subcommand outputs, overrides, exit codes."""

from __future__ import annotations

import subprocess
import sys

import numpy as np
import pytest

from polyident.bench import parse_report_csv
from polyident.cli import main
from polyident.signals import SampleSet

MINI_BENCH = """
signal:
  modes:
    - {beta: 1.5, alpha: 0.00555, omega: 0.08}
    - {beta: 3.5, alpha: 0.00666, omega: 0.11}
sampling:
  kind: uniform
  count: 50
  step: 5.6
snr_db: 20
snr_convention: unit
seed: 11
methods:
  - {method: mp, J: 12, M: 4}
bench:
  n_trials: 3
"""


def run(*argv) -> int:
    return main(list(argv))


@pytest.fixture
def mini_cfg(tmp_path):
    p = tmp_path / "mini.cfg"
    p.write_text(MINI_BENCH)
    return str(p)


# ── simulate ─────────────────────────────────────────────────────────

class TestSimulate:
    def test_writes_record_and_truth(self, tmp_path):
        out = tmp_path / "sim"
        rc = run("simulate", "--config", "example1.cfg", "--out", str(out))
        assert rc == 0
        samples = SampleSet.from_csv(out / "samples.csv")
        truth = SampleSet.from_csv(out / "samples_truth.csv")
        assert samples.n == 50
        np.testing.assert_array_equal(samples.times, truth.times)
        assert not np.array_equal(samples.values, truth.values)

    def test_same_seed_reproduces_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("simulate", "--config", "example1.cfg",
                   "--out", str(a)) == 0
        assert run("simulate", "--config", "example1.cfg",
                   "--out", str(b)) == 0
        assert (a / "samples.csv").read_bytes() == \
            (b / "samples.csv").read_bytes()

    def test_seed_override_changes_noise_not_truth(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run("simulate", "--config", "example1.cfg", "--out", str(a))
        run("simulate", "--config", "example1.cfg", "--seed", "7",
            "--out", str(b))
        sa = SampleSet.from_csv(a / "samples.csv")
        sb = SampleSet.from_csv(b / "samples.csv")
        assert not np.array_equal(sa.values, sb.values)
        assert (a / "samples_truth.csv").read_bytes() == \
            (b / "samples_truth.csv").read_bytes()


# ── reconstruct ──────────────────────────────────────────────────────

class TestReconstruct:
    def test_emits_grid_and_diagnostics(self, tmp_path):
        out = tmp_path / "rec"
        rc = run("reconstruct", "--config", "example2.cfg", "--out", str(out))
        assert rc == 0
        grid_lines = (out / "grid.csv").read_text().splitlines()
        assert grid_lines[0] == "i,t,y"
        assert len(grid_lines) > 40
        # automatic order selection publishes its variance curve
        curve = (out / "variance_curve.csv").read_text().splitlines()
        assert curve[0] == "N,sigma2"
        assert (out / "error_autocorr.csv").exists()
        assert (out / "error_sequence.csv").exists()
        assert (out / "noise_sequence.csv").exists()

    def test_fixed_order_config_omits_variance_curve(self, tmp_path):
        out = tmp_path / "rec"
        rc = run("reconstruct", "--config", "example1.cfg", "--out", str(out))
        assert rc == 0
        assert (out / "grid.csv").exists()
        assert not (out / "variance_curve.csv").exists()

    def test_accepts_record_from_file(self, tmp_path):
        sim = tmp_path / "sim"
        run("simulate", "--config", "example1.cfg", "--out", str(sim))
        out = tmp_path / "rec"
        rc = run("reconstruct", "--config", "example1.cfg", "--out", str(out),
                 str(sim / "samples.csv"))
        assert rc == 0
        assert (out / "grid.csv").exists()
        # truth sidecar next to the input enables the noise sequence
        assert (out / "noise_sequence.csv").exists()


# ── estimate ─────────────────────────────────────────────────────────

class TestEstimate:
    def test_writes_pole_table_and_diagnostics(self, tmp_path):
        out = tmp_path / "est"
        rc = run("estimate", "--config", "example1.cfg", "--out", str(out))
        assert rc == 0
        lines = (out / "estimates.csv").read_text().splitlines()
        assert lines[0] == "method,alpha,f,beta_re,beta_im"
        assert len(lines) >= 3  # two conjugate pairs at least
        assert "[pt-mle]" in (out / "estimates_diagnostics.txt").read_text()

    def test_noiseless_estimates_match_configured_modes(self, tmp_path, mini_cfg):
        cfg = tmp_path / "clean.cfg"
        cfg.write_text(MINI_BENCH.replace("snr_db: 20", "snr_db: inf"))
        out = tmp_path / "est"
        assert run("estimate", "--config", str(cfg), "--out", str(out)) == 0
        rows = [ln.split(",") for ln in
                (out / "estimates.csv").read_text().splitlines()[1:]]
        pos = sorted((float(f), float(a)) for _, a, f, _, _ in rows
                     if float(f) > 0)
        two_pi = 2.0 * np.pi
        assert pos[0][0] == pytest.approx(0.08 / two_pi, rel=1e-6)
        assert pos[0][1] == pytest.approx(0.00555, rel=1e-6)
        assert pos[1][0] == pytest.approx(0.11 / two_pi, rel=1e-6)
        assert pos[1][1] == pytest.approx(0.00666, rel=1e-6)


# ── bench ────────────────────────────────────────────────────────────

class TestBench:
    def test_writes_parseable_report(self, tmp_path, mini_cfg):
        out = tmp_path / "bench"
        rc = run("bench", "--config", mini_cfg, "--out", str(out))
        assert rc == 0
        report = parse_report_csv((out / "report.csv").read_text())
        assert len(report.rows) == 4
        for row in report.rows:
            assert row.n_valid + row.n_failed == 3
        assert (out / "report.txt").read_text().startswith("method")
        assert "base_seed" in (out / "report_diagnostics.txt").read_text()

    def test_reruns_are_byte_identical(self, tmp_path, mini_cfg):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("bench", "--config", mini_cfg, "--out", str(a)) == 0
        assert run("bench", "--config", mini_cfg, "--out", str(b)) == 0
        assert (a / "report.csv").read_bytes() == \
            (b / "report.csv").read_bytes()


# ── exit codes and entry points ──────────────────────────────────────

class TestExitCodes:
    def test_missing_config_is_a_config_error(self, capsys):
        assert run("simulate", "--config", "missing.cfg") == 2
        assert "config error" in capsys.readouterr().err

    def test_unknown_key_is_a_config_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text(MINI_BENCH + "\nbogus_section: 1\n")
        assert run("bench", "--config", str(bad)) == 2
        assert "bogus_section" in capsys.readouterr().err

    def test_runtime_estimation_failure_exits_three(self, tmp_path, capsys):
        # order exceeds what a 50-sample record supports; the parser
        # cannot know that, so it surfaces as a numerical error
        bad = tmp_path / "bad.cfg"
        bad.write_text(MINI_BENCH.replace("J: 12", "J: 60"))
        out = tmp_path / "o"
        assert run("estimate", "--config", str(bad),
                   "--out", str(out)) == 3
        assert "error" in capsys.readouterr().err

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "polyident", "simulate",
             "--config", "example1.cfg", "--out", str(tmp_path / "o")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "samples.csv" in proc.stdout
