from __future__ import annotations
from sys import platform
import argparse
import sys
from typing import Optional, Sequence

from LoggingConfigurator import logger, configure_logger
from Errors import ConfigError, NecklaceError
from GetModuleReference import list_commands
from ConfigLoader import load_run_config
from Commands import CommandLogic
from Commands.SweepRunner import SweepRunner

try:
    # noinspection PyUnresolvedReferences
    import pretty_errors
    pretty_errors.activate()
except ImportError:
    pass


VERSION_TAG = "0.2.0"

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2


# ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="NecklaceWaveguide",
        description="Band structure, truncation and inverse design of periodic necklace quantum graphs.",
    )
    parser.add_argument("--version", action="version", version=VERSION_TAG)

    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, handler in list_commands(CommandLogic).items():
        sub = subparsers.add_parser(name, help=(handler.__doc__ or "").strip().splitlines()[0])

        sub.add_argument("--config", required=True, help="JSON run configuration")
        sub.add_argument("--sigma-min", dest="sigma_min", type=float)
        sub.add_argument("--sigma-max", dest="sigma_max", type=float)
        sub.add_argument("--grid", type=int)
        sub.add_argument("--cells", type=int, help="number of cells in the truncated chain")
        sub.add_argument("--eps", type=float)
        sub.add_argument("--sigma0", type=float)
        sub.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
        sub.add_argument("--output", help="output file, stdout when omitted")
        sub.add_argument("--format", choices=("csv", "json"))
        sub.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Command line driver. Returns process exit code.
    """

    args = build_parser().parse_args(argv)
    configure_logger(args.verbose)
    logger.debug(f"Platform: {platform} Version: {VERSION_TAG}")

    handler = list_commands(CommandLogic)[args.command]

    try:
        config = load_run_config(args.config, args.command, vars(args))
        handler(config, SweepRunner(args.jobs))

    except ConfigError as err:
        logger.error(f"{type(err).__name__}: {err}")
        return EXIT_CONFIG

    except NecklaceError as err:
        logger.error(f"{type(err).__name__}: {err}")
        return EXIT_NUMERICAL

    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
