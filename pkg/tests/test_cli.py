"""End-to-end tests of the command-line front end."""

import json
import math

import numpy as np
import pytest

from wavedecay.cli import main

EXAMPLE_CFG = {
    # F = (u_t)^2 (d_1 u): symbol restricts to cos^2(theta)
    "C": [0.0] * 12 + [-1.0] + [0.0] * 14,
}


def _write_cfg(tmp_path, body, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(body))
    return str(p)


# ---------------------------------------------------------------------------
# analyze


def test_analyze_clean_classification(tmp_path):
    cfg = _write_cfg(tmp_path, EXAMPLE_CFG)
    out = tmp_path / "out"
    assert main(["analyze", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["quadratic_null"] is True
    assert report["prediction"]["nu"] == 1
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "analyze"
    assert manifest["error"] is None
    for name in manifest["outputs"]:
        assert (out / name).exists()


def test_analyze_cubic_null(tmp_path):
    cfg = _write_cfg(tmp_path, {"C": [0.0] * 27})
    out = tmp_path / "out"
    assert main(["analyze", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["cubic_null"] is True
    assert "prediction" not in report


def test_analyze_sign_condition_failure_exits_2(tmp_path):
    body = {"C": [0.0] * 27}
    body["C"][0] = 1.0      # F = +(u_t)^3: symbol identically -1
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "out"
    assert main(["analyze", cfg, "--out", str(out)]) == 2
    report = json.loads((out / "report.json").read_text())
    assert report["agemi"]["status"] == "fails"


def test_analyze_malformed_config_exits_64(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out = tmp_path / "out"
    assert main(["analyze", str(bad), "--out", str(out)]) == 64
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["error"] is not None

    cfg = _write_cfg(tmp_path, {"C": [1.0, 2.0]})   # wrong tensor size
    assert main(["analyze", cfg, "--out", str(out)]) == 64
    assert main(["analyze", str(tmp_path / "missing.json"), "--out", str(out)]) == 64


# ---------------------------------------------------------------------------
# profile


def test_profile_matches_closed_form(tmp_path):
    body = dict(EXAMPLE_CFG)
    body["ray"] = {
        "sigma": 0.0, "omega": [1.0, 0.0], "eps": 0.1, "mu": 0.05,
        "t_end": 1e6, "v0": 0.5,
    }
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "out"
    assert main(["profile", cfg, "--out", str(out)]) == 0
    rows = np.genfromtxt(out / "profile.csv", delimiter=",", names=True)
    t0 = rows["t"][0]
    exact = 0.5 / np.sqrt(1.0 + 0.25 * np.log(rows["t"] / t0))
    assert np.max(np.abs(rows["V"] - exact) / exact) < 1e-8
    bound = json.loads((out / "bound_report.json").read_text())
    assert bound["P"] == pytest.approx(1.0)
    assert bound["bound_holds"] is True
    assert bound["sqrtlog_constant"] < 1.05


def test_profile_degenerate_direction_flagged(tmp_path):
    body = dict(EXAMPLE_CFG)
    # symbol cos^2 vanishes in the (0, 1) direction
    body["ray"] = {"sigma": 0.0, "omega": [0.0, 1.0], "t_end": 1e4}
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "out"
    assert main(["profile", cfg, "--out", str(out)]) == 0
    bound = json.loads((out / "bound_report.json").read_text())
    assert bound["degenerate_direction"] is True
    assert "sqrtlog_constant" not in bound


def test_profile_anti_dissipative_direction_exits_2(tmp_path):
    body = {"C": [0.0] * 27}
    body["C"][0] = 1.0
    body["ray"] = {"sigma": 0.0, "omega": [1.0, 0.0]}
    cfg = _write_cfg(tmp_path, body)
    assert main(["profile", cfg, "--out", str(tmp_path / "out")]) == 2


def test_profile_bad_time_window_exits_64(tmp_path):
    body = dict(EXAMPLE_CFG)
    body["ray"] = {"sigma": 0.0, "omega": [1.0, 0.0], "t_end": 1.0}
    cfg = _write_cfg(tmp_path, body)
    assert main(["profile", cfg, "--out", str(tmp_path / "out")]) == 64


def test_profile_ensemble_of_directions(tmp_path):
    # per-direction constants are finite wherever the symbol is positive
    for k in range(8):
        theta = 2.0 * math.pi * k / 8.0
        body = dict(EXAMPLE_CFG)
        body["ray"] = {"sigma": 0.0, "omega_angle": theta, "t_end": 1e4}
        cfg = _write_cfg(tmp_path, body, name=f"cfg{k}.json")
        out = tmp_path / f"out{k}"
        assert main(["profile", cfg, "--out", str(out)]) == 0
        bound = json.loads((out / "bound_report.json").read_text())
        if abs(math.cos(theta)) > 1e-6:
            assert not bound["degenerate_direction"]
            assert np.isfinite(bound["sqrtlog_constant"])
        else:
            assert bound["degenerate_direction"]


# ---------------------------------------------------------------------------
# simulate


SIM_CFG = {
    "C": [0.0] * 27,
    "data": {"kind": "smooth_bump", "R": 1.0, "eps": 0.1},
    "grid": {"h": 0.25, "T": 4.0, "L": 7.0, "checkpoint_interval": 2.0},
}


def test_simulate_outputs_and_checkpoints(tmp_path):
    body = json.loads(json.dumps(SIM_CFG))
    body["C"][0] = -1.0     # damping
    body["rays"] = [{"sigma": 0.0, "omega": [1.0, 0.0]}]
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "out"
    assert main(["simulate", cfg, "--out", str(out)]) == 0
    rows = np.genfromtxt(out / "energy.csv", delimiter=",", names=True)
    assert rows["t"][-1] == pytest.approx(4.0)
    manifest = json.loads((out / "manifest.json").read_text())
    for name in manifest["outputs"]:
        assert (out / name).exists()
    header = json.loads((out / "checkpoint_0000.json").read_text())
    n = header["n"]
    raw = np.fromfile(out / "checkpoint_0000.bin", dtype="<f8")
    assert raw.size == 2 * n * n
    assert (out / "profile_ray0.csv").exists()
    assert (out / "diagnostics.json").exists()


def test_simulate_zero_amplitude_energy_is_zero(tmp_path):
    body = json.loads(json.dumps(SIM_CFG))
    body["data"]["eps"] = 0.0
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "out"
    assert main(["simulate", cfg, "--out", str(out)]) == 0
    rows = np.genfromtxt(out / "energy.csv", delimiter=",", names=True)
    assert np.all(rows["E"] == 0.0)


def test_simulate_bound_column_present_with_prediction(tmp_path):
    body = json.loads(json.dumps(SIM_CFG))
    body["C"] = EXAMPLE_CFG["C"]    # finite-zeros symbol -> prediction exists
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "out"
    assert main(["simulate", cfg, "--out", str(out)]) == 0
    with open(out / "energy.csv") as fh:
        header = fh.readline().strip()
    assert header == "t,E,E_bound"
    rows = np.genfromtxt(out / "energy.csv", delimiter=",", names=True)
    assert np.all(rows["E"] <= rows["E_bound"] * (1 + 1e-12))


def test_simulate_malformed_grid_exits_64(tmp_path):
    body = json.loads(json.dumps(SIM_CFG))
    del body["grid"]["h"]
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "out"
    assert main(["simulate", cfg, "--out", str(out)]) == 64
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["error"] is not None


def test_simulate_blow_up_exits_3(tmp_path):
    body = json.loads(json.dumps(SIM_CFG))
    body["C"][0] = 60.0     # strong anti-damping
    body["data"]["eps"] = 2.5
    body["grid"] = {"h": 0.25, "T": 12.0, "L": 18.0}
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "out"
    assert main(["simulate", cfg, "--out", str(out)]) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert "BlowUpError" in manifest["error"]


def test_set_flag_overrides_config(tmp_path):
    body = dict(EXAMPLE_CFG)
    body["ray"] = {"sigma": 0.0, "omega": [1.0, 0.0], "t_end": 1e4, "v0": 0.5}
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "out"
    assert main(["profile", cfg, "--set", "ray.t_end=1e6", "--out", str(out)]) == 0
    rows = np.genfromtxt(out / "profile.csv", delimiter=",", names=True)
    assert rows["t"][-1] == pytest.approx(1e6)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["ray"]["t_end"] == pytest.approx(1e6)
    # malformed override is a usage error
    assert main(["profile", cfg, "--set", "bogus", "--out", str(out)]) == 64


def test_simulate_deterministic_csv(tmp_path):
    cfg = _write_cfg(tmp_path, SIM_CFG)
    bodies = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        assert main(["simulate", cfg, "--out", str(out)]) == 0
        bodies.append((out / "energy.csv").read_bytes())
    assert bodies[0] == bodies[1]


# ---------------------------------------------------------------------------
# verify / report


def test_verify_unknown_suite_exits_64(capsys):
    assert main(["verify", "bogus"]) == 64


@pytest.mark.parametrize("suite", ["algebra", "structure", "ode"])
def test_verify_suites_pass(suite, capsys):
    assert main(["verify", suite]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "FAIL" not in out


def test_report_emits_svg(tmp_path):
    pytest.importorskip("matplotlib")
    cfg = _write_cfg(tmp_path, SIM_CFG)
    out = tmp_path / "out"
    assert main(["simulate", cfg, "--out", str(out)]) == 0
    assert main(["report", str(out)]) == 0
    svg = (out / "report.svg").read_text()
    assert svg.lstrip().startswith("<?xml")


def test_report_requires_run_dir(tmp_path):
    assert main(["report", str(tmp_path)]) == 64
