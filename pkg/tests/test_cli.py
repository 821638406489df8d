import json

import numpy as np
import pytest

from loopcont.cli import RunConfig, dumps, main
from loopcont.deformation import constant_problem
from loopcont.errors import ConfigError
from loopcont.loops import LoopCurve
from loopcont.monodromy import random_null_loop


def run(tmp_path, command, config=None, seed=None):
    argv = [command, "--out", str(tmp_path / "out")]
    if config is not None:
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        argv += ["--config", str(path)]
    if seed is not None:
        argv += ["--seed", str(seed)]
    status = main(argv)
    summary = tmp_path / "out" / "summary.json"
    return status, json.loads(summary.read_text()) if summary.exists() else None


@pytest.mark.parametrize("config", [
    {"tolerances": {"manifold": 0.0}},
    {"tolerances": {"manifold": -1e-3}},
    {"tolerances": {"wobble": 1e-3}},
    {"grids": {"n_t": 1}},
    {"grids": {"n_loop": 2.5}},
    {"seed": -1},
    {"colour": "blue"},
    {"command": "harmonic"},
    {"options": {"speed": 3}},
])
def test_configuration_errors_exit_4(tmp_path, config):
    status, summary = run(tmp_path, "verify", config)
    assert status == 4 and summary is None


def test_unreadable_config_exits_4(tmp_path, capsys):
    (tmp_path / "bad.json").write_text("{not json")
    assert main(["verify", "--config", str(tmp_path / "bad.json")]) == 4
    err = json.loads(capsys.readouterr().err)
    assert err["status"] == "config_error"


def test_run_config_defaults_and_overrides():
    cfg = RunConfig.from_dict({"tolerances": {"overlap": 1e-7}, "grids": {"n_t": 64}}, "verify")
    assert cfg.tol.overlap == 1e-7 and cfg.tol.manifold == 1e-10
    assert cfg.grids["n_t"] == 64 and cfg.grids["n_loop"] == 32
    assert RunConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()
    with pytest.raises(ConfigError):
        RunConfig("nonsense")


def test_verify_passes_and_is_deterministic(tmp_path):
    status, first = run(tmp_path, "verify", seed=3)
    text = (tmp_path / "out" / "summary.json").read_text()
    assert status == 0 and first["status"] == "ok" and all(first["checks"].values())
    assert first["schema_version"] == 1
    status, _ = run(tmp_path, "verify", seed=3)
    assert status == 0 and (tmp_path / "out" / "summary.json").read_text() == text
    log = (tmp_path / "out" / "run.log").read_text().splitlines()
    assert len(log) == 2 and "elapsed" in log[0]


def test_harmonic_operations(tmp_path):
    status, s = run(tmp_path, "harmonic", {"options": {"operation": "arc_measure",
                                                        "arcs": [[0, 1], [2, 3]]}})
    assert status == 0 and s["result"]["measure"] == pytest.approx(1 / np.pi)
    status, s = run(tmp_path, "harmonic", {"options": {"operation": "certificate",
                                                        "arcs": [[0, 2]], "delta": 0.2}})
    assert status == 0 and s["checks"]["certificate_verified"]
    status, _ = run(tmp_path, "harmonic", {"options": {"operation": "spectrum"}})
    assert status == 4


def test_numerical_failure_exits_3_with_error_record(tmp_path):
    status, s = run(tmp_path, "harmonic", {"options": {"operation": "lemma53", "eps": 0.8,
                                                        "max_degree": 16}})
    assert status == 3 and s["status"] == "numerical_failure"
    assert s["error"]["type"] == "DegreeExhausted"
    assert s["error"]["details"]["required_range"] > 1e5


def test_push_disc_from_problem_file(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(constant_problem().to_record()))
    status, s = run(tmp_path, "push-disc", {"options": {"problem": str(path)}})
    assert status == 0 and s["result"]["report"]["passed"]
    status, _ = run(tmp_path, "push-disc")
    assert status == 4


def test_continue_from_curve_file(tmp_path):
    x = random_null_loop(np.random.default_rng(0))
    path = tmp_path / "curve.json"
    path.write_text(LoopCurve([0.0, 0.5, 1.0], [x, x, x]).dumps())
    status, s = run(tmp_path, "continue", {"options": {"curve": str(path)}})
    assert status == 0 and s["result"]["closed"]
    assert abs(s["result"]["increment"]["re"]) < 1e-12
    trace = (tmp_path / "out" / "trace.csv").read_text().splitlines()
    assert trace[0].startswith("t,re_f,im_f") and len(trace) == 4
    (tmp_path / "broken.json").write_text("[]")
    status, _ = run(tmp_path, "continue", {"options": {"curve": str(tmp_path / "broken.json")}})
    assert status == 4


def test_dumps_is_canonical():
    text = dumps({"b": np.float64(1.5), "a": [1 + 2j, np.int64(3)], "c": np.array([True])})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text)["a"][0] == {"im": 2.0, "re": 1.0}
