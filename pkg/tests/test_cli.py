import csv
import io
import json
import shutil
import subprocess

import numpy as np
import pytest

from mossbeat import (
    DEFAULT_RHODIUM,
    RunConfig,
    doppler_speed_per_linewidth,
    natural_linewidth,
    read_count_series,
    read_ratio_series,
    thermal_strain_rate,
)
from mossbeat.cli import run_cli


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_estimate_values(capsys):
    assert run_cli(["estimate"]) == 0
    rows = {r["name"]: float(r["value"]) for r in _rows(capsys.readouterr().out)}
    assert rows["natural_linewidth_eV"] == natural_linewidth(DEFAULT_RHODIUM.tau0)
    assert rows["doppler_speed_m_per_s"] == doppler_speed_per_linewidth(DEFAULT_RHODIUM)
    assert rows["thermal_strain_rate_per_s"] == thermal_strain_rate(DEFAULT_RHODIUM)
    assert rows["tau_d_over_tau0"] == pytest.approx(0.88, rel=1e-12)


def test_estimate_json(capsys):
    assert run_cli(["estimate", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert set(data) == {
        "natural_linewidth_eV",
        "doppler_speed_m_per_s",
        "thermal_strain_rate_per_s",
        "tau_d_s",
        "tau_d_over_tau0",
    }


def test_bragg_output(capsys):
    assert run_cli(["bragg", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data[0]["theta_deg"] == pytest.approx(7.65, abs=0.01)
    assert all(c["residual"] <= 1e-9 for c in data)


def test_beat_matches_library(capsys):
    assert run_cli(["beat", "--set", "beat_grid.n=4"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 4
    cfg = RunConfig.default()
    cfg.set_path("beat_grid.n", 4)
    from mossbeat import beat_curve

    ref = beat_curve(cfg.beat(), cfg.beat_grid())
    got = np.array([[float(r["t_s"]), float(r["intensity"])] for r in rows])
    assert np.array_equal(got, ref)


def test_fieldmap_grid(capsys):
    assert run_cli(["fieldmap", "--set", "fieldmap.n=5"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 25
    assert set(rows[0]) == {
        "x_m", "y_m", "z_m", "re_ex", "im_ex", "re_ey", "im_ey", "re_ez", "im_ez", "abs_e",
    }


def test_flm_closed_form_row(capsys):
    assert run_cli(["flm", "--set", "ensemble.n_samples=5000", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert "coherent_mc" in data and "closed_form" in data
    assert abs(data["coherent_mc"]["value"] - data["closed_form"]["value"]) <= max(
        3.0 * (data["coherent_mc"]["stderr"] or 0.0), 1e-9
    )


def test_simulate_writes_reproducible_files(tmp_path, capsys):
    prefix = str(tmp_path / "runA")
    args = [
        "simulate",
        "--out", prefix,
        "--set", "binning.width_s=600",
        "--set", "binning.horizon_s=18000",
    ]
    assert run_cli(args) == 0
    capsys.readouterr()
    first = (tmp_path / "runA_gamma.csv").read_bytes()
    assert run_cli(args) == 0
    capsys.readouterr()
    assert (tmp_path / "runA_gamma.csv").read_bytes() == first
    gamma = read_count_series(tmp_path / "runA_gamma.csv")
    kalpha = read_count_series(tmp_path / "runA_kalpha.csv")
    assert gamma.channel == "gamma"
    assert kalpha.channel == "kalpha"
    assert len(gamma) == 30


def test_seed_flag_changes_counts(tmp_path, capsys):
    base = ["simulate", "--set", "binning.width_s=600", "--set", "binning.horizon_s=6000"]
    a = str(tmp_path / "a")
    b = str(tmp_path / "b")
    assert run_cli(base + ["--out", a]) == 0
    assert run_cli(base + ["--out", b, "--seed", "7"]) == 0
    capsys.readouterr()
    ca = read_count_series(a + "_gamma.csv").counts
    cb = read_count_series(b + "_gamma.csv").counts
    assert not np.array_equal(ca, cb)


def test_simulate_fit_normalize_pipeline(tmp_path, capsys):
    prefix = str(tmp_path / "run")
    sim = [
        "simulate",
        "--out", prefix,
        "--set", "beat.n0=400.0",
        "--set", "beat.tau_d=485.7",
        "--set", "binning.width_s=24",
        "--set", "binning.horizon_s=14400",
    ]
    assert run_cli(sim) == 0
    capsys.readouterr()

    fit_out = tmp_path / "fit.json"
    fit = [
        "fit",
        "--data", prefix + "_gamma.csv",
        "--out", str(fit_out),
        "--set", "beat.tau_d=2000.0",
        "--set", "beat.phi0=0.0",
        "--set", "fit.phase_grid=4",
    ]
    assert run_cli(fit) == 0
    result = json.loads(fit_out.read_text())
    assert result["converged"]
    assert result["params"]["tau_d"] == pytest.approx(485.7, rel=0.05)
    assert result["dof"] == 600 - 3
    assert len(result["covariance"]) == 3

    ratio_out = tmp_path / "ratio.csv"
    assert run_cli([
        "normalize",
        "--gamma", prefix + "_gamma.csv",
        "--kalpha", prefix + "_kalpha.csv",
        "--out", str(ratio_out),
    ]) == 0
    ratio = read_ratio_series(ratio_out)
    assert len(ratio) == 600


def test_config_file_flag(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"beat": {"tau_d": 1234.5}}))
    assert run_cli(["estimate", "--config", str(path)]) == 0
    capsys.readouterr()


def test_exit_codes(tmp_path, capsys):
    assert run_cli(["no-such-command"]) == 2
    assert run_cli(["--help"]) == 0
    assert run_cli(["estimate", "--set", "bogus.key=1"]) == 2
    assert run_cli(["fit", "--data", str(tmp_path / "missing.csv")]) == 2
    assert run_cli(["beat", "--set", "beat.tau0=-5"]) == 1
    broken = tmp_path / "broken.json"
    broken.write_text("{nope")
    assert run_cli(["estimate", "--config", str(broken)]) == 2
    bad_csv = tmp_path / "bad.csv"
    bad_csv.write_text("a,b\n1,2\n")
    assert run_cli(["fit", "--data", str(bad_csv)]) == 1
    capsys.readouterr()


def test_set_flag_requires_equals(capsys):
    assert run_cli(["estimate", "--set", "justakey"]) == 2
    capsys.readouterr()


def test_console_script_installed():
    exe = shutil.which("mossbeat")
    assert exe, "console script not on PATH"
    proc = subprocess.run([exe, "estimate"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("name,value")
