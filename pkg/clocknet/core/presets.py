"""
Shipped experiment presets and config resolution.

Resolution order: preset -> config file -> ``--set key.path=value`` overrides
-> explicit flags (seed, output directory, threads).
"""

import copy
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from pydantic import ValidationError

from clocknet.core.errors import ConfigError
from clocknet.schemas.experiment import ExperimentConfig

logger = logging.getLogger(__name__)

PRESETS: Dict[str, Dict[str, Any]] = {
    # d = 1 km, f_s = 0.5 kHz, T = 500 s, 100 shots per point, T2 = 50 s
    "fig4-top": {
        "spacetime": {"elevations": [0.0, 1000.0, 2000.0]},
        "protocol": {"ghz_n": 1},
        "trace": {
            "sample_rate": 500.0,
            "total_time": 500.0,
            "shots_per_point": 100,
            "sampler": "AnalyticBernoulli",
            "noise": {"t2": 50.0},
        },
        "spectra": {"outcome": 0, "band": [56.5, 57.1]},
    },
    # N = 100 super-atoms, f_s = 10 kHz, T = 5 s; effective dephasing T2/N = 0.5 s.
    # N*f12 ~ 5.68 kHz is above Nyquist and folds to ~4.32 kHz.
    "fig4-bottom": {
        "spacetime": {"elevations": [0.0, 1000.0, 2000.0]},
        "protocol": {"ghz_n": 100},
        "trace": {
            "sample_rate": 10000.0,
            "total_time": 5.0,
            "shots_per_point": 100,
            "sampler": "AnalyticBernoulli",
            "noise": {"t2": 50.0},
        },
        "spectra": {"outcome": 0, "band": [4310.0, 4330.0]},
    },
    "fig4-bottom-20k": {
        "spacetime": {"elevations": [0.0, 1000.0, 2000.0]},
        "protocol": {"ghz_n": 100},
        "trace": {
            "sample_rate": 20000.0,
            "total_time": 5.0,
            "shots_per_point": 100,
            "sampler": "AnalyticBernoulli",
            "noise": {"t2": 50.0},
        },
        "spectra": {"outcome": 0, "band": [5670.0, 5690.0]},
    },
    "flat": {
        "spacetime": {"gm": 0.0, "elevations": [0.0, 1000.0, 2000.0]},
        "trace": {"sample_rate": 500.0, "total_time": 20.0, "shots_per_point": 100},
    },
    # node 3 at node 2's height: one beat note, no split
    "two-node": {
        "spacetime": {"elevations": [0.0, 1000.0, 1000.0]},
        "trace": {"sample_rate": 500.0, "total_time": 50.0, "shots_per_point": 100},
        "spectra": {"outcome": 0, "band": [56.0, 58.0]},
    },
}


def preset_names() -> Iterable[str]:
    return sorted(PRESETS)


def _merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_override(data: Dict[str, Any], assignment: str) -> Dict[str, Any]:
    """Apply one ``key.path=value``; values are parsed as JSON when possible."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key.path=value")
    path, raw = assignment.split("=", 1)
    keys = [k for k in path.strip().split(".") if k]
    if not keys:
        raise ConfigError(f"override {assignment!r} has an empty key path")

    out = copy.deepcopy(data)
    node = out
    for key in keys[:-1]:
        child = node.setdefault(key, {})
        if not isinstance(child, dict):
            raise ConfigError(f"override path {path!r}: {key!r} is not a section")
        node = child
    node[keys[-1]] = _parse_value(raw.strip())
    return out


def load_config_file(path: str) -> Dict[str, Any]:
    file = Path(path)
    if not file.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        data = json.loads(file.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno}: {e.msg}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def validation_detail(e: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in e.errors()
    )


def resolve_experiment(
    preset: Optional[str] = None,
    config_path: Optional[str] = None,
    overrides: Iterable[str] = (),
    seed: Optional[int] = None,
    output_dir: Optional[str] = None,
    threads: Optional[int] = None,
) -> ExperimentConfig:
    data: Dict[str, Any] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; available: {', '.join(preset_names())}")
        data = _merge(data, PRESETS[preset])
        data["preset"] = preset
    if config_path is not None:
        data = _merge(data, load_config_file(config_path))
    for assignment in overrides:
        data = apply_override(data, assignment)
    if seed is not None:
        data["seed"] = seed
    if output_dir is not None:
        data["output_dir"] = output_dir
    if threads is not None:
        data["threads"] = threads

    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {validation_detail(e)}")
    logger.debug("Resolved config: %s", config.model_dump(mode="json"))
    return config
