import argparse
import logging

from clocknet.cli.common import add_common_arguments, emit, output_dir, resolve
from clocknet.core.errors import AcceptanceError
from clocknet.services.storage_service import StorageService
from clocknet.services.verify_service import VerifyService

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", help="built-in acceptance checks")
    add_common_arguments(parser)
    parser.add_argument("--samples", type=int, default=20, help="random cases per check")
    parser.set_defaults(handler=run, action="run acceptance checks")


def run(args: argparse.Namespace) -> int:
    config = resolve(args)
    report = VerifyService.run(seed=config.seed, samples=max(1, args.samples))

    StorageService.write_json(report, output_dir(config) / "verify.json")
    emit({c.name: {"passed": c.passed, "value": c.value, "tolerance": c.tolerance} for c in report.checks})
    if not report.passed:
        raise AcceptanceError(f"{len(report.failures)} check(s) failed: {', '.join(c.name for c in report.failures)}")
    return 0
