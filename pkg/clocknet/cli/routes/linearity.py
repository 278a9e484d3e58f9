import argparse

from clocknet.cli.common import add_common_arguments, emit, output_dir, resolve, write_resolved
from clocknet.cli.routes.born import foundation_params
from clocknet.services.foundations_service import FoundationsService
from clocknet.services.storage_service import StorageService


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("linearity", help="product-state run compared with the entangled protocol")
    add_common_arguments(parser)
    parser.add_argument("--exact", action="store_true", help="closed-form probabilities, no shot noise")
    parser.set_defaults(handler=run, action="run linearity check")


def run(args: argparse.Namespace) -> int:
    config = resolve(args)
    shots = 0 if args.exact else config.foundations.shots

    report = FoundationsService.product_state_protocol(foundation_params(config), shots=shots, seed=config.seed)

    directory = output_dir(config)
    write_resolved(config, directory)
    path = StorageService.write_json(report, directory / "linearity.json")
    emit(
        {
            "entangled": report.entangled,
            "conditional": report.conditional,
            "success_probability": report.success_probability,
            "total_variation": report.total_variation,
            "sector_weights": report.sector_weights,
            "outputs": {"linearity": str(path)},
        }
    )
    return 0
