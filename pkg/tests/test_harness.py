import csv
import json

import pytest
import yaml

from nftnoise.errors import ConfigError
from nftnoise.harness.cli import main
from nftnoise.harness.config import EXPERIMENT_IDS, ExperimentConfig, defaults, validate
from nftnoise.harness.runner import (EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PASS, EXIT_THRESHOLD,
                                     run_experiment, write_csv)

FAST_GRID = {"half_width": 16.0, "n_samples": 1024}


def _write(tmp_path, data, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


def _e9(**extra):
    cfg = {"experiment_id": "E9", "seed": 5, "runs": 12, "grid": FAST_GRID,
           "params": {"epsilon": 0.01}}
    cfg.update(extra)
    return cfg


# --------------------------------------------------------------------------
# config validation

def test_missing_seed_names_the_field():
    with pytest.raises(ConfigError) as exc:
        validate({"experiment_id": "E9"})
    assert exc.value.path == "seed"


def test_unknown_field_is_rejected():
    with pytest.raises(ConfigError) as exc:
        validate(_e9(params={"epsilonn": 0.1}))
    assert exc.value.path == "params.epsilonn"


@pytest.mark.parametrize("patch,path", [
    ({"runs": 1}, "runs"),
    ({"runs": "many"}, "runs"),
    ({"params": {"epsilon": -1.0}}, "params.epsilon"),
    ({"params": {"bandwidth": 2.0}}, "params.bandwidth"),
    ({"search": {"im_min": 0.0}}, "search.im_min"),
    ({"params": {"g": "median"}}, "params.g"),
    ({"experiment_id": "E11"}, "experiment_id"),
])
def test_invalid_values_name_their_field(patch, path):
    with pytest.raises(ConfigError) as exc:
        validate(_e9(**patch))
    assert exc.value.path == path
    assert str(exc.value).startswith(path)


def test_sweep_amplitudes_length_checked():
    cfg = {"experiment_id": "E7", "seed": 1, "params": {"sweep_amplitudes": [1.0, 2.0]}}
    with pytest.raises(ConfigError):
        validate(cfg)


def test_defaults_validate_for_every_experiment():
    for eid in EXPERIMENT_IDS:
        raw = defaults(eid)
        assert validate(raw) == raw


def test_hash_ignores_workers_and_output_dir():
    a = ExperimentConfig.from_mapping(_e9())
    b = a.with_overrides(workers=3, output_dir="elsewhere")
    c = a.with_overrides(seed=6)
    assert a.hash() == b.hash() != c.hash()


def test_shipped_configs_validate():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "configs"
    files = sorted(root.glob("*.yaml"))
    assert len(files) == 10
    assert {ExperimentConfig.from_file(f).experiment_id for f in files} == set(EXPERIMENT_IDS)


# --------------------------------------------------------------------------
# CLI

def test_list_has_ten_entries(capsys):
    assert main(["list", "--json"]) == EXIT_PASS
    entries = json.loads(capsys.readouterr().out)
    assert [e["id"] for e in entries] == list(EXPERIMENT_IDS)


def test_validate_exit_codes(tmp_path, capsys):
    assert main(["validate", "-c", _write(tmp_path, _e9())]) == EXIT_PASS
    assert main(["validate", "-c", _write(tmp_path, {"experiment_id": "E9"})]) == EXIT_CONFIG
    assert "seed" in capsys.readouterr().err
    assert main(["validate", "-c", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG


def test_run_pass_and_threshold_failure(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "-c", _write(tmp_path, _e9()), "-o", str(out)]) == EXIT_PASS
    summary = json.loads((out / "E9" / "summary.json").read_text())
    assert summary["passed"] and summary["status"] == "pass"
    strict = _e9(thresholds={"min_correlation": 0.999999999})
    assert main(["run", "-c", _write(tmp_path, strict), "-o", str(out)]) == EXIT_THRESHOLD


def test_run_config_error_exit(tmp_path):
    assert main(["run", "-c", _write(tmp_path, _e9(runs=-4))]) == EXIT_CONFIG


def test_numerical_failure_exit(tmp_path):
    # a pulse below the soliton threshold has no eigenvalues to track
    cfg = _e9(params={"amplitude": 0.2})
    code = main(["run", "-c", _write(tmp_path, cfg), "-o", str(tmp_path)])
    assert code in (EXIT_CONFIG, EXIT_NUMERICAL)
    manifest = json.loads((tmp_path / "E9" / "manifest.json").read_text())
    assert manifest["exit_code"] == code and manifest["error"]


# --------------------------------------------------------------------------
# artifacts

def test_csv_is_rfc4180(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ["a", "b"], [[1.5, 'say "hi"'], [True, "x,y"]])
    raw = path.read_bytes()
    assert raw == b'a,b\r\n1.5,"say ""hi"""\r\ntrue,"x,y"\r\n'
    with open(path, newline="") as f:
        assert list(csv.reader(f)) == [["a", "b"], ["1.5", 'say "hi"'], ["true", "x,y"]]


def test_rerun_reproduces_bytes_and_worker_count_does_not_matter(tmp_path):
    cfg = ExperimentConfig.from_mapping(_e9())
    a = run_experiment(cfg, tmp_path / "a")
    b = run_experiment(cfg, tmp_path / "b")
    c = run_experiment(cfg.with_overrides(workers=2), tmp_path / "c")
    for name in ("linearity.csv", "summary.json"):
        first = (a.directory / name).read_bytes()
        assert first == (b.directory / name).read_bytes()
        assert first == (c.directory / name).read_bytes()
    manifest = json.loads((a.directory / "manifest.json").read_text())
    assert manifest["config_hash"] == cfg.hash()
    assert len(manifest["streams"][0]["seeds"]) == 12
    assert "spawn_key" in manifest["seed_rule"]


def test_phase_table_spans_two_pi(tmp_path):
    cfg = ExperimentConfig.from_mapping({
        "experiment_id": "E5", "seed": 2, "runs": 40, "grid": FAST_GRID,
        "params": {"n_boot": 50}})
    out = run_experiment(cfg, tmp_path)
    assert out.exit_code in (EXIT_PASS, EXIT_THRESHOLD)
    with open(out.directory / "angle_vs_phase.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    phases = [float(r["nonlinear_phase"]) for r in rows]
    assert min(phases) == 0.0
    assert max(phases) == pytest.approx(8.0)
