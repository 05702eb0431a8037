import json
import subprocess
import sys

import numpy as np
import pytest

from circledim.cli import main, resolve_config, run, ConfigError
from circledim.errors import UnknownFixture
from circledim.fixtures import fixture_names, fixtures
from circledim.maps import circle_dist
from circledim.words import evaluate_word


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        fixtures("no-such-system")


def test_every_fixture_builds():
    for name in fixture_names():
        fx = fixtures(name)
        assert fx.name == name and fx.system.maps
        assert fx.config["experiment"]


def test_solvable_relation_holds():
    for k, t in ((1, 1.0), (2, 1.0), (3, 0.25)):
        fx = fixtures("solvable-2k", k=k, t=t)
        al = fx.system
        lhs_w, rhs_w = (al.parse(side) for side in fx.reference["relation"])
        x = np.linspace(0, 1, 500, endpoint=False)
        lhs, _, _ = evaluate_word(al, lhs_w, x)
        rhs, _, _ = evaluate_word(al, rhs_w, x)
        assert np.max(circle_dist(lhs, rhs)) < 1e-9


def test_fixtures_list(capsys):
    assert main(["fixtures", "--list"]) == 0
    assert capsys.readouterr().out.split() == fixture_names()
    assert main(["fixtures", "--show", "moran2"]) == 0
    assert json.loads(capsys.readouterr().out)["name"] == "moran2"
    assert main(["fixtures", "--show", "nope"]) == 2


def test_schema_command(capsys):
    assert main(["schema", "results"]) == 0
    assert "status" in json.loads(capsys.readouterr().out)["required"]


def test_resolve_config_fills_defaults():
    cfg = resolve_config({"experiment": "structure", "system": {"fixture": "mobius-pair"}})
    assert cfg["parameters"]["n"] == 200 and cfg["seed"] == 0
    assert cfg["budget"]["max_words"] > 0
    with pytest.raises(ConfigError):
        resolve_config({"experiment": "nope", "system": {"fixture": "moran2"}})
    with pytest.raises(ConfigError):
        resolve_config({"experiment": "structure", "system": {"fixture": "moran2"}, "extra": 1})


def test_invalid_parameter_exit_code(tmp_path):
    cfg = {"experiment": "critexp", "system": {"fixture": "schottky2"}, "parameters": {"base_points": [0.1], "eps": -0.01, "max_len": 4}}
    out = tmp_path / "out"
    assert run(cfg, output_dir=str(out)) == 2
    assert json.loads((out / "manifest.json").read_text())["status"] == "invalid"
    assert not (out / "results.json").exists()


def test_unknown_fixture_exit_code(tmp_path):
    assert run({"experiment": "structure", "system": {"fixture": "nope"}}, output_dir=str(tmp_path)) == 2


def test_budget_exit_code(tmp_path):
    cfg = {
        "experiment": "critexp",
        "system": {"fixture": "schottky2"},
        "parameters": {"base_points": [0.1], "eps": 0.01, "max_len": 14},
        "budget": {"max_words": 1000},
    }
    assert run(cfg, output_dir=str(tmp_path)) == 3
    res = json.loads((tmp_path / "results.json").read_text())
    assert res["status"] == "budget_exceeded" and res["error"]["type"] == "BudgetExceeded"


def test_unreliable_exit_code(tmp_path):
    cfg = {"experiment": "poincare", "system": {"fixture": "cyclic-hyperbolic"}, "parameters": {"x": 0.3, "max_len": 30, "s_values": [0.3, 0.6]}}
    assert run(cfg, output_dir=str(tmp_path)) == 4
    assert json.loads((tmp_path / "results.json").read_text())["error"]["type"] == "NoBracket"


def test_pingpong_violation_is_a_result(tmp_path):
    cfg = {
        "experiment": "pingpong",
        "system": {"fixture": "schottky2"},
        "parameters": {"mode": "certify", "cones": [[[0.85, 0.3]], [[0.1, 0.3]], [[0.35, 0.3]], [[0.6, 0.3]]]},
    }
    assert run(cfg, output_dir=str(tmp_path)) == 0
    res = json.loads((tmp_path / "results.json").read_text())
    assert res["certified"] is False and res["condition"] == 4


def test_structure_run_and_repeat(tmp_path):
    cfg = write(tmp_path, {"experiment": "structure", "system": {"fixture": "mobius-pair"}, "parameters": {"seeds": 5}})
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        assert main(["run", str(cfg), "--seed", "3", "--output", str(out)]) == 0
        outs.append((out / "results.json").read_bytes())
    assert outs[0] == outs[1]
    res = json.loads(outs[0])
    assert (res["d"], res["r"], res["seed"], res["status"]) == (1, 1, 3, "ok")
    assert (tmp_path / "run0" / "clusters.csv").exists()
    assert "elapsed_seconds" in json.loads((tmp_path / "run0" / "manifest.json").read_text())


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "circledim", "fixtures", "--list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "moran2" in proc.stdout
    bad = write(tmp_path, {"experiment": "structure"})
    proc = subprocess.run([sys.executable, "-m", "circledim", "run", str(bad), "--output", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 2
