"""Run an experiment and write its artifacts.

Output directory layout (``<output_dir>/<experiment_id>/``):

* ``<table>.csv``: one RFC-4180 file per result table (CRLF line ends);
* ``summary.json``: checks, metrics and pass/fail;
* ``manifest.json``: config hash, code version, per-run seeds, exclusion
  audit, wall-clock time and final status.

Only the manifest holds timestamps, so re-running a config reproduces the
CSV and summary bytes exactly.
"""
from __future__ import annotations

import csv
import json
import platform
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import ConfigError, InvalidInputError, NFTNoiseError
from ..parallel import SEED_RULE, run_seed
from .config import ExperimentConfig
from .experiments import CATALOGUE, ExperimentResult, _plain

EXIT_PASS = 0
EXIT_THRESHOLD = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


@dataclass
class RunOutcome:
    result: ExperimentResult
    exit_code: int
    directory: Path
    error: str = ""


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(_plain(data), indent=2, sort_keys=True, allow_nan=True) + "\n")


def _seeds(cfg: ExperimentConfig, result: ExperimentResult) -> list:
    out = []
    for label, stream, runs in result.streams:
        states = [int(run_seed(cfg.seed, i, stream).generate_state(1, np.uint64)[0])
                  for i in range(runs)]
        out.append({"label": label, "stream": stream, "runs": runs, "seeds": states})
    return out


def run_experiment(cfg: ExperimentConfig, output_dir=None) -> RunOutcome:
    """Run ``cfg`` and write CSV, summary and manifest files.

    Module errors do not escape: they set the exit code (2 for invalid
    inputs, 3 for numerical failures) and are recorded in the manifest next
    to whatever tables were already computed.
    """
    exp = CATALOGUE[cfg.experiment_id]
    out_dir = Path(output_dir or cfg.data["output_dir"]) / cfg.experiment_id
    out_dir.mkdir(parents=True, exist_ok=True)
    result = ExperimentResult(cfg.experiment_id)
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    error, code = "", None
    try:
        exp.run(cfg, result)
    except InvalidInputError as exc:
        error, code = f"{type(exc).__name__}: {exc}", EXIT_CONFIG
    except (NFTNoiseError, FloatingPointError, np.linalg.LinAlgError) as exc:
        error, code = f"{type(exc).__name__}: {exc}", EXIT_NUMERICAL
    wall = time.perf_counter() - t0
    if code is None:
        code = EXIT_PASS if result.passed else EXIT_THRESHOLD

    for t in result.tables:
        write_csv(out_dir / f"{t.name}.csv", t.columns, t.rows)
    status = {EXIT_PASS: "pass", EXIT_THRESHOLD: "threshold-fail", EXIT_CONFIG: "config-error",
              EXIT_NUMERICAL: "numerical-failure"}[code]
    _write_json(out_dir / "summary.json", {
        "experiment_id": exp.id, "title": exp.title, "figures": exp.figures,
        "status": status, "passed": code == EXIT_PASS,
        "checks": [c.as_dict() for c in result.checks],
        "metrics": result.metrics, "metadata": result.metadata, "error": error,
    })
    _write_json(out_dir / "manifest.json", {
        "experiment_id": exp.id, "config_hash": cfg.hash(), "config": cfg.data,
        "code_version": __version__, "python": platform.python_version(),
        "numpy": np.__version__, "seed_rule": SEED_RULE, "master_seed": cfg.seed,
        "workers": cfg.workers, "streams": _seeds(cfg, result),
        "exclusion_audit": result.audits, "started_utc": started.isoformat(),
        "wall_clock_s": wall, "status": status, "exit_code": code, "error": error,
        "tables": [f"{t.name}.csv" for t in result.tables],
    })
    return RunOutcome(result, code, out_dir, error)


def run_config_file(path, *, seed=None, workers=None, output_dir=None) -> RunOutcome:
    cfg = ExperimentConfig.from_file(path).with_overrides(seed=seed, workers=workers,
                                                         output_dir=output_dir)
    return run_experiment(cfg)


__all__ = ["run_experiment", "run_config_file", "write_csv", "RunOutcome", "ConfigError",
           "EXIT_PASS", "EXIT_THRESHOLD", "EXIT_CONFIG", "EXIT_NUMERICAL"]
