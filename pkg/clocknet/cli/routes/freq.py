import argparse
import math
from typing import Any, Dict

from clocknet.cli.common import add_common_arguments, emit, output_dir, resolve, write_resolved
from clocknet.core.errors import DomainError
from clocknet.services.spacetime_service import SpacetimeService
from clocknet.services.spectra_service import SpectraService
from clocknet.services.storage_service import StorageService

TWO_PI = 2.0 * math.pi


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("freq", help="beat notes, curvature split and wall time")
    add_common_arguments(parser)
    parser.set_defaults(handler=run, action="compute frequencies")


def _relative(a: float, b: float) -> float:
    return 0.0 if b == 0.0 else (a - b) / b


def run(args: argparse.Namespace) -> int:
    """
    Tabulate omega12, omega23, omega13, the split (exact and leading order) and T.
    """
    config = resolve(args)
    cfg, clocks, n = config.spacetime, config.clocks, config.protocol.ghz_n

    beats = SpacetimeService.beat_frequencies(cfg, clocks)
    table: Dict[str, Any] = {
        "ghz_n": n,
        "omega12": beats.omega12 * n,
        "omega23": beats.omega23 * n,
        "omega13": beats.omega13 * n,
        "f12_hz": beats.omega12 * n / TWO_PI,
        "f23_hz": beats.omega23 * n / TWO_PI,
        "f13_hz": beats.omega13 * n / TWO_PI,
        "deficits": SpacetimeService.deficits(cfg),
    }

    try:
        split = SpacetimeService.curvature_split(cfg, clocks)
        table.update(
            {
                "split_exact": split.exact * n,
                "split_leading": split.leading_order * n,
                "split_exact_hz": split.exact * n / TWO_PI,
                "split_leading_hz": split.leading_order * n / TWO_PI,
                "split_relative_difference": _relative(split.leading_order, split.exact),
                "linear_potential_split": SpacetimeService.linear_potential_split(cfg, clocks),
            }
        )
    except DomainError as e:
        table["split_note"] = e.detail

    try:
        wall = SpacetimeService.required_wall_time(cfg, clocks, n)
        table["wall_time_inverse_split_s"] = wall.inverse_split
        table["wall_time_fft_resolution_s"] = wall.fft_resolution
    except DomainError as e:
        table["wall_time_note"] = e.detail

    if cfg.gm > 0.0:
        fit = SpacetimeService.fitted_cubic_coefficient(cfg, clocks)
        table["cubic_coefficient_fitted"] = fit.coefficient
        table["cubic_coefficient_quoted"] = fit.quoted_coefficient
        table["cubic_coefficient_series"] = fit.series_coefficient

    table["expected_lines"] = [
        line.model_dump() for line in SpectraService.expected_lines(cfg, clocks, n, config.trace.sample_rate)
    ]
    if config.trace.noise.t2 is not None:
        table["effective_t2_s"] = config.trace.noise.t2 / n

    directory = output_dir(config)
    write_resolved(config, directory)
    StorageService.write_json(table, directory / "freq.json")
    emit(table)
    return 0
