import json
import math

import pandas as pd
import pytest

from cone_capacity.main import run


def _scenario(**overrides):
    scenario = {
        "name": "small_sphere",
        "cone": {"n": 3, "half_angle": math.pi / 2},
        "sigma": {"type": "sphere", "R": 1.0},
        "mesh": {"n_theta": 4, "n_rho": 32, "levels": [0, 1]},
        "truncation": {"r_out": [8.0, 16.0, 32.0]},
        "solver": {"p": 2.0},
    }
    for section, values in overrides.items():
        if isinstance(values, dict) and isinstance(scenario.get(section), dict):
            scenario[section] = {**scenario[section], **values}
        else:
            scenario[section] = values
    return scenario


@pytest.fixture
def write_scenario(tmp_path):
    def write(name="scenario.json", **overrides):
        path = tmp_path / name
        path.write_text(json.dumps(_scenario(**overrides)), encoding="utf-8")
        return path
    return write


def _invoke(command, config, out, *extra):
    return run([command, "--config", str(config), "--out", str(out), "--quiet", *extra])


def _load(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_solve_sphere(write_scenario, tmp_path):
    out = tmp_path / "out"
    assert _invoke("solve", write_scenario(), out) == 0

    report = _load(out / "report.json")
    assert report["exit_status"] == 0
    assert report["truncation"]["extrapolated"] == pytest.approx(math.pi, rel=0.02)
    assert report["solve"]["converged"]
    assert "wall_time" not in report["solve"]
    assert {record["name"] for record in report["audit"]["records"]} >= {"surface_capacity", "pohozaev"}
    for name in ("sigma_profile.csv", "ray_profile.csv", "pfunction.csv"):
        assert (out / name).exists()

    profile = pd.read_csv(out / "sigma_profile.csv")
    assert (profile["grad_norm"] - 1.0).abs().max() <= 0.02


def test_verify_sphere_passes(write_scenario, tmp_path):
    assert _invoke("verify", write_scenario(), tmp_path / "out") == 0


def test_verify_reports_audit_failure(write_scenario, tmp_path):
    config = write_scenario(audit={"identity_mismatch": 1e-12})
    out = tmp_path / "out"
    assert _invoke("verify", config, out) == 4
    report = _load(out / "report.json")
    assert report["exit_status"] == 4
    assert report["audit"]["failures"]


def test_csv_uses_crlf(write_scenario, tmp_path):
    out = tmp_path / "out"
    _invoke("solve", write_scenario(), out)
    raw = (out / "sigma_profile.csv").read_bytes()
    assert raw.count(b"\r\n") == raw.count(b"\n")


def test_deterministic_reports_match(write_scenario, tmp_path):
    config = write_scenario()
    reports = []
    for name in ("first", "second"):
        assert _invoke("solve", config, tmp_path / name, "--deterministic", "--threads", "2") == 0
        report = _load(tmp_path / name / "report.json")
        report.pop("timing")
        reports.append(report)
    assert reports[0] == reports[1]


def test_rejects_obtuse_cone(write_scenario, tmp_path):
    config = write_scenario(cone={"n": 3, "half_angle": 2.0})
    assert _invoke("solve", config, tmp_path / "out") == 2


def test_rejects_unknown_section(write_scenario, tmp_path):
    assert _invoke("solve", write_scenario(extras={}), tmp_path / "out") == 2


def test_missing_scenario(tmp_path):
    assert _invoke("solve", tmp_path / "absent.json", tmp_path / "out") == 2


def test_solver_budget_exhausted(write_scenario, tmp_path):
    config = write_scenario(solver={"p": 1.5, "max_iter": 1})
    assert _invoke("solve", config, tmp_path / "out") == 3


def test_geometry_of_sphere(write_scenario, tmp_path):
    out = tmp_path / "out"
    assert _invoke("geometry", write_scenario(), out) == 0
    report = _load(out / "geometry.json")
    assert abs(report["isoperimetric_deficit"]) <= 1e-8
    assert abs(report["heintze_karcher_deficit"]) <= 1e-8
    assert (out / "curvature_profile.csv").exists()


def test_geometry_of_perturbed_cap(write_scenario, tmp_path):
    config = write_scenario(sigma={"type": "cosine_series", "R": 1.0, "coefficients": [0.2]})
    out = tmp_path / "out"
    assert _invoke("geometry", config, out) == 0
    report = _load(out / "geometry.json")
    assert report["isoperimetric_deficit"] > 0
    assert report["heintze_karcher_deficit"] > 0


def test_geometry_rejects_non_orthogonal_curve(write_scenario, tmp_path):
    config = write_scenario(sigma={"type": "harmonics", "R": 1.0, "terms": [[1.0, 0.1]]})
    assert _invoke("geometry", config, tmp_path / "out") == 2


def test_study_needs_levels(write_scenario, tmp_path):
    config = write_scenario(mesh={"n_theta": 4, "n_rho": 32, "levels": []})
    assert _invoke("study", config, tmp_path / "out") == 2


def test_study_orders(write_scenario, tmp_path):
    config = write_scenario(mesh={"n_theta": 4, "n_rho": 16, "levels": [0, 1, 2]})
    out = tmp_path / "out"
    assert _invoke("study", config, out) == 0

    summary = _load(out / "study.json")
    assert summary["reference_capacity"] == pytest.approx(math.pi)
    assert len(summary["capacity_orders"]) == 2
    assert summary["capacity_orders"][-1] >= 1.0

    table = pd.read_csv(out / "study.csv")
    assert set(table["level"]) == {0, 1, 2}
    assert table["extrapolated"].sum() == 3


def test_model_table(write_scenario, tmp_path):
    out = tmp_path / "out"
    assert _invoke("model", write_scenario(), out) == 0
    constants = _load(out / "model.json")
    assert constants["capacity"] == pytest.approx(math.pi)
    assert constants["boundary_gradient"] == pytest.approx(1.0)
    table = pd.read_csv(out / "model.csv")
    assert len(table) == 33
    assert table["model"].iloc[0] == pytest.approx(1.0)


def test_runs_are_logged(write_scenario, tmp_path):
    out = tmp_path / "out"
    config = write_scenario()
    _invoke("geometry", config, out)
    _invoke("solve", config, out)
    lines = (out / "runs.jsonl").read_text().splitlines()
    sessions = [json.loads(line) for line in lines]
    assert [s["command"] for s in sessions] == ["geometry", "solve"]
    assert sessions[1]["solves"] == 3
    assert all(s["exit_status"] == 0 for s in sessions)


def test_toml_scenario(tmp_path):
    config = tmp_path / "quick.toml"
    config.write_text(
        'name = "quick"\n[cone]\nn = 3\n[sigma]\ntype = "sphere"\nR = 1.0\n'
        '[mesh]\nn_theta = 4\nn_rho = 16\n[truncation]\nr_out = [4.0, 8.0, 16.0]\n',
        encoding="utf-8",
    )
    assert _invoke("geometry", config, tmp_path / "out") == 0
