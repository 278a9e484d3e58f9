import argparse
import logging

import numpy as np

from clocknet.cli.common import add_common_arguments, emit, output_dir, resolve, write_resolved
from clocknet.schemas.analytic import ObservableParams
from clocknet.schemas.experiment import ExperimentConfig
from clocknet.schemas.spacetime import PhaseSet
from clocknet.services.foundations_service import FoundationsService
from clocknet.services.spacetime_service import SpacetimeService
from clocknet.services.storage_service import StorageService

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("born", help="third-order interference check of the Born rule")
    add_common_arguments(parser)
    parser.add_argument("--inject", type=float, help="add a synthetic three-way term to P123")
    parser.add_argument("--exact", action="store_true", help="closed-form probabilities, no shot noise")
    parser.set_defaults(handler=run, action="run Born-rule check")


def foundation_params(config: ExperimentConfig) -> ObservableParams:
    """Phases from the config if given, otherwise the laser-frame phases at ``foundations.time``."""
    section, n = config.foundations, config.protocol.ghz_n
    if section.theta is not None:
        phases = PhaseSet.from_reduced(section.theta, section.phi or [0.0, 0.0], section.time)
    else:
        theta, phi = SpacetimeService.laser_frame_phases(
            config.spacetime, config.clocks, np.array([section.time])
        )
        phases = PhaseSet.from_reduced(list(theta[0]), list(phi[0]), section.time)
    return ObservableParams.from_phases(phases, ghz_n=n)


def run(args: argparse.Namespace) -> int:
    config = resolve(args)
    section = config.foundations
    shots = 0 if args.exact else section.shots
    inject = section.inject if args.inject is None else args.inject

    report = FoundationsService.born_i123(foundation_params(config), shots=shots, seed=config.seed, inject=inject)

    directory = output_dir(config)
    write_resolved(config, directory)
    path = StorageService.write_json(report, directory / "born.json")
    emit(
        {
            "i123": report.i123,
            "i123_error": report.i123_error,
            "consistent_with_zero": report.consistent_with_zero(),
            "shots": report.shots,
            "injected": report.injected,
            "outputs": {"born": str(path)},
        }
    )
    return 0
