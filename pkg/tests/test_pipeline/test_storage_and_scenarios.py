import json
import math

import pytest

from cone_capacity.core.config.settings import SCENARIO_DIR
from cone_capacity.core.errors import ConfigError
from cone_capacity.core.utils import dump_json
from cone_capacity.models.config import load_scenario, resolve_scenario_path
from cone_capacity.models.reports import SolveReport
from cone_capacity.storage import ReportStorage


def test_report_without_iterations_writes_null(tmp_path):
    target = ReportStorage(tmp_path).write_json("solve.json", SolveReport(p=2.0))
    text = target.read_text(encoding="utf-8")
    assert "NaN" not in text and "Infinity" not in text
    assert json.loads(text)["final_grad_norm"] is None


def test_nonfinite_values_become_null():
    payload = {"a": float("nan"), "b": [1.0, float("inf"), {"c": -math.inf}], "d": (2, "x")}
    assert json.loads(dump_json(payload)) == {"a": None, "b": [1.0, None, {"c": None}], "d": [2, "x"]}


def test_bundled_scenario_by_name():
    assert resolve_scenario_path("quick") == SCENARIO_DIR / "quick.toml"
    assert resolve_scenario_path("sphere") == SCENARIO_DIR / "sphere.json"
    scenario = load_scenario("quick")
    assert scenario.solver.eps_schedule == [1e-1, 1e-3, 1e-6]
    assert scenario.solver.tol == 1e-8
    assert scenario.solver.max_iter == 100


@pytest.mark.parametrize("path", sorted(SCENARIO_DIR.iterdir()), ids=lambda path: path.name)
def test_bundled_scenarios_parse(path):
    scenario = load_scenario(path)
    assert scenario.solver.p > 1.0


def test_unknown_scenario_name():
    with pytest.raises(ConfigError, match="not found"):
        load_scenario("no_such_scenario")


def test_unknown_solver_preset(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"solver": {"preset": "fastest"}}), encoding="utf-8")
    with pytest.raises(ConfigError, match="unknown solver preset"):
        load_scenario(path)
