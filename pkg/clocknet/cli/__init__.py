"""Command line entry point: one subcommand per route module."""

import argparse
import logging
from typing import List, Optional

from clocknet import __version__
from clocknet.cli.routes import ROUTES
from clocknet.core.config import settings
from clocknet.core.errors import ClockNetError
from clocknet.core.logging import configure_logging
from clocknet.core.presets import preset_names

logger = logging.getLogger("clocknet.cli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clocknet",
        description="Three-node entangled clock network in curved spacetime.",
        epilog=f"presets: {', '.join(preset_names())}",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.log_level, help="DEBUG, INFO, WARNING or ERROR")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for route in ROUTES:
        route.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except ClockNetError as e:
        logger.error("Failed to %s: %s", args.action, e.detail)
        return e.exit_code
    except Exception as e:
        logger.exception("Failed to %s: %s", args.action, e)
        return 2
