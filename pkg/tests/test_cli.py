import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from groupgame.cli.config import ConfigError, config_from_dict, load_config
from groupgame.cli.main import main
from groupgame.cli.report import CSV_COLUMNS, to_json

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
REPORT_KEYS = ["schema_version", "toolkit_version", "mode", "config", "status", "solvers",
               "equilibrium", "theorem1", "theorem2", "closed_form", "diagnostics"]


def write(tmp_path, doc, name="c.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def olig(**extra):
    doc = {"family": "oligopoly", "params": {"a": 10, "b": 0.5, "cA": 2, "cC": 1}}
    doc.update(extra)
    return doc


@pytest.mark.parametrize("name", ["oligopoly.json", "quadratic_saddle.json", "custom_expr.json"])
def test_shipped_configs_load(name):
    cfg = load_config(CONFIGS / name)
    assert cfg.family == name.split(".")[0]


@pytest.mark.parametrize("doc,pointer", [
    ({"family": "oligopoly", "params": {"a": 10, "b": 0.5, "cA": 2}}, "/params"),
    (olig(solver={"damping": 2}), "/solver/damping"),
    (olig(solver={"method": "newton"}), "/solver/method"),
    (olig(extra=1), ""),
    ({"family": "custom_expr", "intervals": {"g1": [0, 1], "g2": [0, 1]},
      "payoffs": {"g1": "x1 +* x2", "g2": "y1"}}, "/payoffs/g1"),
    ({"family": "quadratic_saddle", "params": {"h1": 1}}, ""),
    (olig(intervals={"g1": [1, 10], "g2": [0, 10]}), "/intervals"),
    (olig(groups={"m": 1}), "/groups/m"),
])
def test_config_errors_carry_pointer(doc, pointer):
    with pytest.raises(ConfigError) as info:
        config_from_dict(doc)
    assert info.value.pointer == pointer


def test_defaults_filled():
    cfg = config_from_dict(olig())
    assert cfg.space1.hi == 10 and cfg.solver.method == "maximin-fp"
    assert cfg.echo()["solver"]["damping"] == 0.5


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_success_json(tmp_path, capsys):
    code, out, _ = run_cli(["solve", "--config", write(tmp_path, olig()), "--method", "both"], capsys)
    assert code == 0
    data = json.loads(out)
    assert list(data) == REPORT_KEYS
    assert data["status"]["verified"] is True
    assert data["equilibrium"]["point"]["s1"] == pytest.approx(14 / 9, abs=1e-4)
    assert data["theorem1"]["holds"] and data["theorem2"]["holds"]
    assert data["closed_form"]["max_abs_error"] <= 1e-4
    assert len(data["theorem1"]["other_pairs"]) == 6
    assert "timings" not in data


def test_json_round_trips_floats(tmp_path, capsys):
    _, out, _ = run_cli(["solve", "--config", write(tmp_path, olig()), "--method", "best-response"], capsys)
    data = json.loads(out)
    assert to_json(data) == out


def test_byte_identical_reports(tmp_path, capsys):
    path = write(tmp_path, olig(verify={"diagnostics": True}))
    outs = [run_cli(["solve", "--config", path], capsys)[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_csv_report(tmp_path, capsys):
    target = tmp_path / "r.csv"
    code, out, _ = run_cli(["solve", "--config", write(tmp_path, olig()), "--format", "csv",
                            "--out", str(target), "--method", "best-response"], capsys)
    assert code == 0 and out == ""
    rows = list(csv.reader(io.StringIO(target.read_text())))
    assert tuple(rows[0]) == CSV_COLUMNS
    row = dict(zip(rows[0], rows[1]))
    assert row["method"] == "best-response" and row["exit_code"] == "0"
    assert float(row["s2"]) == pytest.approx(10 / 3, abs=1e-4)


def test_non_convergence_exit_2(tmp_path, capsys):
    code, out, err = run_cli(["solve", "--config", write(tmp_path, olig(solver={"max_iter": 2})),
                              "--verbose"], capsys)
    assert code == 2
    assert json.loads(out)["status"]["converged"] is False
    assert err.count("residual=") == 2


def test_verify_exit_codes(tmp_path, capsys):
    path = write(tmp_path, olig())
    code, out, _ = run_cli(["verify", "--config", path, "--point", str(14 / 9), str(10 / 3)], capsys)
    assert code == 0 and json.loads(out)["mode"] == "verify"
    code, out, _ = run_cli(["verify", "--config", path, "--point", "3", "3"], capsys)
    assert code == 3
    data = json.loads(out)
    assert data["status"]["verified"] is False
    assert data["theorem1"]["error"]["type"] == "HypothesisNotSatisfiedError"


def test_verify_without_point_is_usage_error(tmp_path, capsys):
    code, _, _ = run_cli(["verify", "--config", write(tmp_path, olig())], capsys)
    assert code == 1


@pytest.mark.parametrize("args", [
    [],
    ["solve"],
    ["solve", "--config", "x.json", "--format", "xml"],
    ["oligopoly", "--a", "10"],
    ["frobnicate"],
])
def test_usage_errors_exit_1(args, capsys):
    with pytest.raises(SystemExit) as info:
        main(args)
    assert info.value.code == 1


def test_missing_config_file(capsys):
    code, _, err = run_cli(["solve", "--config", "/no/such/file.json"], capsys)
    assert code == 1 and "not found" in err


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run_cli(["solve", "--config", write(tmp_path, olig()), "--method", "best-response",
                            "--out", str(tmp_path / "missing" / "r.json")], capsys)
    assert code == 1 and "cannot write" in err


def test_invalid_family_params_exit_1(capsys):
    code, out, _ = run_cli(["oligopoly", "--a", "10", "--b", "1.2", "--cA", "2", "--cC", "1"], capsys)
    assert code == 1
    assert "/params/b" in json.loads(out)["status"]["errors"][0]["message"]


def test_oligopoly_shortcut(capsys):
    code, out, _ = run_cli(["oligopoly", "--a", "10", "--b", "0", "--cA", "2", "--cC", "1",
                            "--timings"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["closed_form"]["point"] == pytest.approx({"s1": 8 / 3, "s2": 4.5})
    assert set(data["solvers"]) == {"maximin-fp", "best-response", "agreement"}
    assert data["timings"]["total"] > 0


def test_custom_expression_runtime_error_exit_1(tmp_path, capsys):
    doc = {"family": "custom_expr", "intervals": {"g1": [0, 1], "g2": [0, 1]},
           "payoffs": {"g1": "1/(x1 - x1)", "g2": "y1"}}
    code, out, _ = run_cli(["solve", "--config", write(tmp_path, doc)], capsys)
    assert code == 1


def test_non_finite_floats_serialize_as_null():
    assert to_json({"v": math.nan, "w": [math.inf, 1.0]}) == '{\n  "v": null,\n  "w": [null, 1.0]\n}\n'


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "groupgame", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "groupgame" in res.stdout
