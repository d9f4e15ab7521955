"""Experiment configuration: defaults, loading and validation.

A config is a nested mapping.  Every key has a default except
``experiment_id`` and ``seed``; user values are merged over the defaults of
the chosen experiment and then checked against the schema.  Unknown keys,
wrong types and out-of-range values raise :class:`ConfigError` naming the
offending field, e.g. ``params.z: must be > 0``.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from ..errors import ConfigError

EXPERIMENT_IDS = tuple(f"E{i}" for i in range(1, 11))

_GRID = {"half_width": 16.0, "n_samples": 2048}
_SEARCH = {"re_min": -2.0, "re_max": 2.0, "im_min": 0.05, "im_max": 3.0, "spacing": 0.1,
           "max_iter": 50, "tol_root": 1e-9, "dedup_radius": 1e-4,
           "low_confidence_im": 0.15, "method": "forward_difference"}
_POINT_NOISE = {"epsilon": 0.05, "segment_length": 0.1, "bandwidth": 0.25}

# experiment-specific defaults: (runs, params, thresholds)
EXPERIMENT_DEFAULTS = {
    "E1": (500, {"lambda1": [0.3, 0.45, 0.6, 0.75], "lambda2": [0.9, 1.05, 1.2, 1.35],
                 "distance_km": 400.0, "length_km": 1500.0, "epsilon": 0.05,
                 "bandwidth": 0.25, "samples_per_unit": 64, "tail_factor": 9.0},
           {"min_correlation": 0.0, "max_inversions": 1}),
    "E2": (50, {"lambda1": [0.7, 0.74, 0.78, 0.82],
                "lambda2": [0.9, 0.924, 0.948, 0.972, 0.996, 1.02],
                "packed_points": 84, "z": 0.1, "epsilon": 0.05, "bandwidth": 0.25,
                "rho": 0.9, "sigma": 0.004, "trials_per_point": 400},
           {"grid_bits": 4.585, "packed_bits": 6.392, "bits_tolerance": 0.01,
            "min_error_ratio": 2.0}),
    "E3": (500, {"eigenvalues": [0.5, 1.5, 2.5], "distance_km": 400.0, "length_km": 1500.0,
                 "epsilon": 0.05, "bandwidth": 0.25},
           {"min_significant_pairs": 1}),
    "E4": (500, {"amplitude": 2.0, "taps": [round(0.1 * k, 10) for k in range(1, 11)],
                 **_POINT_NOISE, "n_boot": 500, "level": 0.95},
           {"min_separated_pairs": 1}),
    "E5": (500, {"amplitude": 2.0, "taps": [round(0.1 * k, 10) for k in range(0, 11)],
                 "partner_taps": [0.1, 0.2, 0.3], **_POINT_NOISE, "n_boot": 500,
                 "level": 0.95},
           {"min_separated_pairs": 1}),
    "E6": (500, {"amplitude": 2.0, "z": 1.0, "segments": 10, "g": "per-eigenvalue-imag",
                 "epsilon": 0.05, "bandwidth": 0.25},
           {"mean_tolerance": 0.15, "covariance_tolerance": 0.15,
            "min_pair_correlation": 0.9}),
    "E7": (1000, {"dominance_amplitude": 1.0, "sweep_amplitudes": [1.2, 3.2, 0.1],
                  "sweep_runs": 200, **_POINT_NOISE},
           {"min_scaling_ratio": 0.8, "max_residual_ratio": 0.2,
            "plateau_tolerance": 0.25, "peak_window": 0.3}),
    "E8": (200, {"eigenvalues": [0.45, 1.05], "half_width": 20.0, "sigma": 0.05,
                 "bandwidth": 0.25, "sigma_sweep": [0.01, 0.02, 0.05]},
           {}),
    "E9": (1000, {"amplitude": 2.0, "g": "sum-imag", **_POINT_NOISE},
           {"min_correlation": 0.95}),
    "E10": (500, {"amplitude": 2.0, "phase": float(np.pi), **_POINT_NOISE, "n_boot": 500,
                  "level": 0.95},
            {}),
}


def defaults(experiment_id: str) -> dict:
    """Fully populated default config (with a placeholder seed of 0)."""
    if experiment_id not in EXPERIMENT_DEFAULTS:
        raise ConfigError(f"unknown experiment {experiment_id!r}; choose from "
                          f"{', '.join(EXPERIMENT_IDS)}", "experiment_id")
    runs, params, thresholds = EXPERIMENT_DEFAULTS[experiment_id]
    return {"experiment_id": experiment_id, "seed": 0, "runs": runs, "workers": 1,
            "output_dir": "results", "max_excluded": 0.05,
            "grid": dict(_GRID), "search": dict(_SEARCH),
            "params": copy.deepcopy(params), "thresholds": dict(thresholds)}


# --------------------------------------------------------------------------
# validation

def _is_int(v):
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _is_num(v):
    return (_is_int(v) or isinstance(v, (float, np.floating))) and np.isfinite(v)


def _check_type(value, default, path):
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = _is_int(value)
    elif isinstance(default, float):
        ok = _is_num(value)
    elif isinstance(default, str):
        ok = isinstance(value, str)
    elif isinstance(default, list):
        if not isinstance(value, list) or not value:
            raise ConfigError("must be a non-empty list", path)
        kind = default[0] if default else 0.0
        for i, v in enumerate(value):
            _check_type(v, kind, f"{path}[{i}]")
        return
    else:
        ok = True
    if not ok:
        raise ConfigError(f"expected {type(default).__name__}, got {value!r}", path)


def _merge(user: dict, base: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in user.items():
        p = f"{path}.{key}" if path else str(key)
        if key not in base:
            raise ConfigError("unknown field", p)
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError("expected a mapping", p)
            out[key] = _merge(value, base[key], p)
        else:
            _check_type(value, base[key], p)
            out[key] = float(value) if isinstance(base[key], float) else value
            if isinstance(base[key], list) and base[key] and isinstance(base[key][0], float):
                out[key] = [float(v) for v in value]
    return out


def _require(cond, path, message):
    if not cond:
        raise ConfigError(message, path)


def _check_ranges(cfg: dict) -> None:
    _require(cfg["seed"] >= 0, "seed", "must be >= 0")
    _require(cfg["runs"] >= 3, "runs", "must be >= 3")
    _require(cfg["workers"] >= 1, "workers", "must be >= 1")
    _require(0 <= cfg["max_excluded"] < 1, "max_excluded", "must be in [0, 1)")
    g = cfg["grid"]
    _require(g["half_width"] > 0, "grid.half_width", "must be > 0")
    _require(g["n_samples"] >= 2, "grid.n_samples", "must be >= 2")
    s = cfg["search"]
    _require(s["im_min"] > 0, "search.im_min", "must be > 0 (upper half plane)")
    _require(s["im_max"] > s["im_min"], "search.im_max", "must exceed search.im_min")
    _require(s["re_max"] > s["re_min"], "search.re_max", "must exceed search.re_min")
    _require(s["spacing"] > 0, "search.spacing", "must be > 0")
    _require(s["method"] in ("forward_difference", "fd", "ablowitz_ladik", "al"),
             "search.method", "must be forward_difference or ablowitz_ladik")
    p = cfg["params"]
    for key in ("epsilon", "sigma"):
        if key in p:
            _require(p[key] >= 0, f"params.{key}", "must be >= 0")
    if "sigma_sweep" in p:
        _require(all(v >= 0 for v in p["sigma_sweep"]), "params.sigma_sweep", "must be >= 0")
    if "bandwidth" in p:
        _require(0 < p["bandwidth"] <= 1, "params.bandwidth", "must be in (0, 1]")
    for key in ("z", "segment_length", "distance_km", "length_km", "amplitude",
                "dominance_amplitude", "phase"):
        if key in p:
            _require(p[key] > 0, f"params.{key}", "must be > 0")
    for key in ("lambda1", "lambda2", "eigenvalues"):
        if key in p:
            _require(all(v > 0 for v in p[key]), f"params.{key}",
                     "imaginary parts must be > 0")
    if "taps" in p:
        _require(all(t >= 0 for t in p["taps"]), "params.taps", "must be >= 0")
    if "g" in p:
        from ..noise import G_KINDS
        _require(p["g"] in G_KINDS, "params.g", f"must be one of {G_KINDS}")
    if "rho" in p:
        _require(-1 < p["rho"] < 1, "params.rho", "must be in (-1, 1)")
    if "level" in p:
        _require(0 < p["level"] < 1, "params.level", "must be in (0, 1)")
    if "segments" in p:
        _require(p["segments"] >= 1, "params.segments", "must be >= 1")
    if "sweep_amplitudes" in p:
        sw = p["sweep_amplitudes"]
        _require(len(sw) == 3 and sw[1] > sw[0] > 0 and sw[2] > 0,
                 "params.sweep_amplitudes", "must be [start, stop, step] with 0 < start < stop")


def validate(raw: dict) -> dict:
    """Merge ``raw`` over the experiment defaults and validate.

    Returns the resolved config; raises :class:`ConfigError` on problems.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping", "<root>")
    if "experiment_id" not in raw:
        raise ConfigError("missing required field", "experiment_id")
    if "seed" not in raw:
        raise ConfigError("missing required field", "seed")
    eid = raw["experiment_id"]
    if not isinstance(eid, str):
        raise ConfigError(f"expected str, got {eid!r}", "experiment_id")
    cfg = _merge(raw, defaults(eid))
    _check_ranges(cfg)
    return cfg


def load(path) -> dict:
    """Read a YAML or JSON config file (unvalidated)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse config: {exc}", str(path)) from None
    return data if data is not None else {}


def config_hash(cfg: dict) -> str:
    """SHA-256 of the canonical JSON form of a resolved config."""
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved, validated configuration of one experiment run."""

    data: dict

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentConfig":
        return cls(validate(raw))

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_mapping(load(path))

    def with_overrides(self, *, seed=None, workers=None, output_dir=None) -> "ExperimentConfig":
        raw = copy.deepcopy(self.data)
        if seed is not None:
            raw["seed"] = seed
        if workers is not None:
            raw["workers"] = workers
        if output_dir is not None:
            raw["output_dir"] = str(output_dir)
        return ExperimentConfig.from_mapping(raw)

    @property
    def experiment_id(self) -> str:
        return self.data["experiment_id"]

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def runs(self) -> int:
        return self.data["runs"]

    @property
    def workers(self) -> int:
        return self.data["workers"]

    @property
    def params(self) -> dict:
        return self.data["params"]

    @property
    def thresholds(self) -> dict:
        return self.data["thresholds"]

    def hash(self) -> str:
        """Hash of everything that affects results (excludes workers and output_dir)."""
        d = {k: v for k, v in self.data.items() if k not in ("workers", "output_dir")}
        return config_hash(d)
