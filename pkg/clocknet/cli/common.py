import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict

from clocknet.core.config import settings
from clocknet.core.presets import preset_names, resolve_experiment
from clocknet.schemas.experiment import ExperimentConfig
from clocknet.services.storage_service import StorageService

logger = logging.getLogger(__name__)


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON experiment config")
    parser.add_argument("--preset", choices=list(preset_names()), help="start from a shipped preset")
    parser.add_argument("--seed", type=int, help="master seed (non-negative)")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="K=V",
        help="override a config value, e.g. --set trace.total_time=20",
    )
    parser.add_argument("--out", metavar="DIR", help=f"output directory (default {settings.output_dir})")
    parser.add_argument("--threads", type=int, help="worker threads")


def resolve(args: argparse.Namespace) -> ExperimentConfig:
    return resolve_experiment(
        preset=args.preset,
        config_path=args.config,
        overrides=args.overrides,
        seed=args.seed,
        output_dir=args.out,
        threads=args.threads,
    )


def output_dir(config: ExperimentConfig) -> Path:
    path = Path(config.output_dir or settings.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_resolved(config: ExperimentConfig, directory: Path) -> Path:
    return StorageService.write_json(config, directory / "resolved_config.json")


def emit(data: Dict[str, Any]) -> None:
    """Result table on stdout; logs stay on stderr."""
    sys.stdout.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
