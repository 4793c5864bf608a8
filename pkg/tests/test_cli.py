"""End-to-end checks of the command-line interface.

Runs the entry point in process with small configs and inspects the
artifacts, JSON summaries, and exit codes.
"""

import json

import numpy as np
import pytest

from oscpulse.cli import main
from oscpulse.config import ExperimentConfig


def read_summary(outdir, name):
    return json.loads((outdir / f"{name}_summary.json").read_text())


def test_config_defaults():
    cfg = ExperimentConfig.load()
    p = cfg.osc_params()
    assert p.omega == 3.0 and p.Omega == 1.0 and p.eps == 0.2
    assert cfg.getint("integration", "store_every") == 10


def test_config_file_and_override_precedence(tmp_path):
    ini = tmp_path / "run.cfg"
    ini.write_text("[integration]\nhorizon = 300\nstore_every = 5\n")
    cfg = ExperimentConfig.load(
        str(ini), {("integration", "horizon"): "150"})
    assert cfg.getfloat("integration", "horizon") == 150.0
    assert cfg.getint("integration", "store_every") == 5


def test_config_missing_file():
    with pytest.raises(FileNotFoundError):
        ExperimentConfig.load("/does/not/exist.cfg")


def test_simulate_writes_trajectory_and_envelope(tmp_path):
    rc = main(["--outdir", str(tmp_path), "simulate", "--t-end", "200"])
    assert rc == 0
    header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,x,xp,y,yp"
    data = np.loadtxt(tmp_path / "trajectory.csv", delimiter=",",
                      skiprows=1)
    assert abs(data[-1, 0] - 200.0) < 0.2
    assert (tmp_path / "envelope.csv").exists()
    summary = read_summary(tmp_path, "simulate")
    assert summary["pass"] is True
    assert summary["measured"]["slope"]["ratio_y"] == pytest.approx(
        1.0, abs=0.1)


def test_simulate_zero_amplitude_stays_zero(tmp_path):
    rc = main(["--outdir", str(tmp_path), "--set", "oscillator.A=0",
               "simulate", "--t-end", "50"])
    assert rc == 0
    data = np.loadtxt(tmp_path / "trajectory.csv", delimiter=",",
                      skiprows=1)
    assert np.all(data[:, 1:] == 0.0)


def test_stability_surface_small_grid(tmp_path):
    rc = main(["--outdir", str(tmp_path),
               "--set", "stability.q_min=35",
               "--set", "stability.q_max=37",
               "--set", "stability.r_min=0",
               "--set", "stability.r_max=4",
               "--set", "stability.grid_step=1",
               "stability"])
    assert rc == 0
    rows = np.loadtxt(tmp_path / "fig2_surface.csv", delimiter=",",
                      skiprows=1)
    assert rows.shape == (15, 3)
    summary = read_summary(tmp_path, "stability_surface")
    assert summary["gates"]["monodromy_determinant"]["pass"]
    at_r0 = rows[rows[:, 1] == 0.0, 2]
    assert np.all(at_r0 == 0.0)


def test_envelope_sweep_artifact(tmp_path):
    rc = main(["--outdir", str(tmp_path), "envelope", "--sweep"])
    assert rc == 0
    header = (tmp_path / "fig11_roots.csv").read_text().splitlines()[0]
    assert header == "H0,r_minus,r_plus,T_tau_prime,T_physical"
    summary = read_summary(tmp_path, "envelope_sweep")
    r = summary["measured"]["roots_at_reference_level"]
    assert r == pytest.approx([0.0, 1.0], abs=1e-12)


def test_envelope_period_mode(tmp_path):
    rc = main(["--outdir", str(tmp_path), "envelope"])
    assert rc == 0
    summary = read_summary(tmp_path, "envelope_period")
    table = summary["measured"]["period_table"]
    assert set(table) == {"tau_prime", "tau", "theta", "t"}
    assert table["tau"] == pytest.approx(5206.221, abs=0.01)
    assert summary["gates"]["dual_period_agreement"]["pass"]
    assert "NotClosedOrbit" in \
        summary["measured"]["closed_form_level_attempt"]


def test_verify_averaging_short_horizon(tmp_path):
    rc = main(["--outdir", str(tmp_path),
               "--set", "integration.horizon=500",
               "verify-averaging"])
    assert rc == 0
    header = (tmp_path / "fig8_residual.csv").read_text().splitlines()[0]
    assert header == "tau,rel_error"
    summary = read_summary(tmp_path, "verify_averaging")
    assert summary["measured"]["median_rel_error_middle_half"] < 0.25


def test_reproduce_figure_1a(tmp_path):
    rc = main(["--outdir", str(tmp_path), "reproduce", "--figure", "1a"])
    assert rc == 0
    summary = read_summary(tmp_path, "fig1a")
    assert summary["figure"] == "1a"
    assert summary["measured"]["matching_normalization"] == "raw_y"
    assert (tmp_path / "fig1a.gp").exists()


def test_reproduce_rejects_unknown_figure(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--outdir", str(tmp_path), "reproduce", "--figure", "99"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_missing_config_file_exit_code(tmp_path):
    rc = main(["--config", "/does/not/exist.cfg",
               "--outdir", str(tmp_path), "simulate"])
    assert rc == 1


def test_gate_violation_exit_code(tmp_path):
    # an unreasonably coarse monodromy step breaks the determinant gate
    rc = main(["--outdir", str(tmp_path),
               "--set", "stability.q_min=35",
               "--set", "stability.q_max=36",
               "--set", "stability.r_min=8",
               "--set", "stability.r_max=10",
               "--set", "stability.grid_step=1",
               "--set", "stability.monodromy_steps=40",
               "stability"])
    assert rc == 3
    summary = read_summary(tmp_path, "stability_surface")
    assert summary["pass"] is False
