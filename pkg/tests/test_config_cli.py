import csv
import json
from pathlib import Path

import pytest

from nonconv.cli import main
from nonconv.config import from_dict, load, validate
from nonconv.errors import ConfigError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = """
kind = "spectrum"
seed = 5

[driver.schedule]
kind = "affine"
a = [1, 2]

[driver.process]
kind = "iid"
sampler = {{ kind = "uniform", low = -1.0, high = 1.0 }}

[driver.matrix_function]
kind = "schrodinger"
lambda = 1.0

[run]
n = {n}
trials = 4
"""


def _write(tmp_path, text, name="c.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.mark.parametrize("path", sorted(p.name for p in CONFIGS.glob("*.toml")
                                        if p.name != "markov_quadratic.toml"))
def test_shipped_configs_validate(path):
    assert validate(load(CONFIGS / path)) == []


def test_quadratic_markov_config_is_rejected(capsys):
    assert main(["validate", "--config", str(CONFIGS / "markov_quadratic.toml")]) == 1
    assert "affine" in capsys.readouterr().err


def test_unknown_keys_are_located():
    raw = {"kind": "spectrum", "seed": 1, "bogus": 1,
           "driver": {"schedule": {"kind": "affine", "a": [1], "c": 2},
                      "process": {"kind": "iid", "sampler": {"kind": "uniform"}},
                      "matrix_function": {"kind": "rotation"}},
           "run": {"n": 10, "speed": 3}}
    with pytest.raises(ConfigError) as info:
        from_dict(raw)
    text = "\n".join(info.value.diagnostics)
    for where in ("bogus", "driver.schedule.c", "run.speed"):
        assert where in text


def test_wrong_types_and_missing_keys():
    raw = {"kind": "spectrum", "seed": -1,
           "driver": {"schedule": {"kind": "affine"},
                      "process": {"kind": "iid", "sampler": {"kind": "uniform"}},
                      "matrix_function": {"kind": "rotation"}},
           "run": {"n": "many"}}
    with pytest.raises(ConfigError) as info:
        from_dict(raw)
    text = "\n".join(info.value.diagnostics)
    assert "seed" in text and "driver.schedule.a: required key missing" in text
    assert "run.n: wrong type" in text


def test_separation_violation_reported():
    cfg = from_dict({"kind": "spectrum", "driver": {
        "schedule": {"kind": "affine", "a": [1, 1], "b": [0, 5]},
        "process": {"kind": "iid", "sampler": {"kind": "uniform"}},
        "matrix_function": {"kind": "rotation"}}})
    diags = validate(cfg)
    assert any("first violation at n = 404" in d for d in diags)


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", _write(tmp_path, SMALL.format(n=200)), "--out", str(out),
                 "--svg"]) == 0
    rows = list(csv.reader(open(out / "results.csv")))
    assert rows[0] == ["index", "gamma", "stderr"] and len(rows) == 3
    assert float(rows[1][1]) == float(repr(float(rows[1][1])))
    summary = json.loads((out / "summary.json").read_text())
    assert summary["kind"] == "spectrum" and summary["seed"] == 5
    assert (out / "plot.svg").read_text().startswith("<svg")
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["run"]["n"] == 200


def test_seed_override_and_manifest_rerun(tmp_path):
    cfg = _write(tmp_path, SMALL.format(n=100))
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "9"]) == 0
    assert json.loads((tmp_path / "a" / "summary.json").read_text())["seed"] == 9
    assert main(["manifest-rerun", str(tmp_path / "a" / "manifest.json"),
                 "--out", str(tmp_path / "b")]) == 0
    for name in ("results.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_invalid_config_exit_code(tmp_path):
    assert main(["run", "--config", _write(tmp_path, SMALL.format(n=0))]) == 1
    assert main(["validate", "--config", str(tmp_path / "missing.toml")]) == 1
    assert main(["validate", "--config", _write(tmp_path, "kind = [", "bad.toml")]) == 1


def test_numerical_failure_exit_code(tmp_path, capsys):
    text = SMALL.format(n=100).replace('kind = "spectrum"', 'kind = "partition"')
    text += "kappa = 0.01\nm1 = 2\n"  # r(2) = 138 > N: no cut point reaches sqrt(N)
    assert main(["run", "--config", _write(tmp_path, text), "--out", str(tmp_path / "o")]) == 2
    assert "DegenerateBlocks" in capsys.readouterr().err


def test_list_builtins(capsys):
    assert main(["list-builtins"]) == 0
    out = capsys.readouterr().out
    assert "schrodinger" in out and "markov" in out


def test_help_lists_schemas(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "gamma_x" in capsys.readouterr().out
