# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from ..__version__ import __version__
from ..config import Config

ParserType = argparse.ArgumentParser
Arguments = argparse.Namespace

logger = logging.getLogger(__name__)

DEFAULT_USER_CONFIG_FILE = "~/.config/biortho-dqpt.toml"

COMMANDS = ("quench", "fisher", "phase-diagram", "sm-example", "table-s1")


def log_level(string: str) -> str:
    """Check if provided string is a valid log level."""

    if not hasattr(logging, string.upper()):
        raise argparse.ArgumentTypeError(
            "log level must be one of {debug,info,warning,error,critical}"
        )
    return string.upper()


def positive_int(string: str) -> int:
    try:
        value = int(string)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(
            f"invalid integer value: {string!r}"
        ) from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def finite_float(string: str) -> float:
    try:
        value = float(string)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(
            f"invalid number: {string!r}"
        ) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise argparse.ArgumentTypeError(f"must be finite, got {string}")
    return value


def value_range(string: str) -> Tuple[float, float]:
    """Parse ``low,high`` into an increasing pair."""
    parts = str(string).split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"range must look like 'low,high', got {string!r}"
        )
    low, high = (finite_float(part.strip()) for part in parts)
    if not low < high:
        raise argparse.ArgumentTypeError(
            f"range lower bound must be below upper bound, got {string!r}"
        )
    return low, high


def _to_defaults(values: Dict[str, Any]) -> Dict[str, Any]:
    defaults = {}

    for key, value in values.items():
        defaults[key.replace("-", "_")] = value

    return defaults


def _add_quench_arguments(parser: ParserType) -> None:
    group = parser.add_argument_group("quench parameters")
    group.add_argument(
        "--eta-i", type=finite_float, help="Prequench hopping asymmetry."
    )
    group.add_argument(
        "--gamma-i", type=finite_float, help="Prequench non-Hermiticity."
    )
    group.add_argument(
        "--eta-f", type=finite_float, help="Postquench hopping asymmetry."
    )
    group.add_argument(
        "--gamma-f", type=finite_float, help="Postquench non-Hermiticity."
    )
    _add_resolution_arguments(parser)


def _add_resolution_arguments(parser: ParserType) -> None:
    group = parser.add_argument_group("resolution")
    group.add_argument(
        "--cells",
        type=positive_int,
        help="Number of unit cells N (default: %(default)s)",
    )
    group.add_argument(
        "--t-max",
        type=finite_float,
        help="End of the time window (default: %(default)s)",
    )
    group.add_argument(
        "--t-steps",
        type=positive_int,
        help="Number of time grid points (default: %(default)s)",
    )
    group.add_argument(
        "--quad-steps",
        type=positive_int,
        help="Quadrature panels per unit time (default: %(default)s)",
    )


def _add_branch_arguments(parser: ParserType) -> None:
    parser.add_argument(
        "--n-min", type=int, help="First Fisher branch (default: %(default)s)"
    )
    parser.add_argument(
        "--n-max", type=int, help="Last Fisher branch (default: %(default)s)"
    )


class CliParser:
    def __init__(self) -> None:
        """Create a command-line arguments parser for biortho-dqpt."""
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument(
            "-h",
            "--help",
            help="Show this help message and exit.",
            action="store_true",
        )
        common.add_argument(
            "-c",
            "--config",
            nargs="?",
            help="Configuration file path. If not set %(prog)s "
            f"tries to load {DEFAULT_USER_CONFIG_FILE}.",
        )
        common.add_argument(
            "-l",
            "--log-file",
            nargs="?",
            default=None,
            help="Log file path (default: console only)",
        )
        common.add_argument(
            "-L",
            "--log-level",
            type=log_level,
            help="Wished level of logging (default: %(default)s)",
        )
        common.add_argument(
            "--threads",
            type=positive_int,
            help="Maximum number of engine workers (default: all CPUs)",
        )
        common.add_argument(
            "-o",
            "--out",
            type=Path,
            help="Output directory (default: %(default)s)",
        )

        parser = argparse.ArgumentParser(
            prog="biortho-dqpt",
            description="Biorthogonal dynamical quantum phase transitions",
            add_help=False,
        )
        parser.add_argument(
            "-h",
            "--help",
            help="Show this help message and exit.",
            action="store_true",
        )
        parser.add_argument(
            "--version",
            help="Print version then exit.",
            action="version",
            version=f"%(prog)s {__version__}",
        )
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")

        quench = subparsers.add_parser(
            "quench",
            add_help=False,
            parents=[common],
            help="Loschmidt rates and DTOP of a quench.",
        )
        _add_quench_arguments(quench)

        fisher = subparsers.add_parser(
            "fisher",
            add_help=False,
            parents=[common],
            help="Fisher-zero branches and their real-time crossings.",
        )
        _add_quench_arguments(fisher)
        _add_branch_arguments(fisher)
        fisher.add_argument(
            "--k-samples",
            type=positive_int,
            help="Momentum samples per branch (default: %(default)s)",
        )

        diagram = subparsers.add_parser(
            "phase-diagram",
            add_help=False,
            parents=[common],
            help="Phase labels and winding numbers on a parameter grid.",
        )
        diagram.add_argument(
            "--eta-range",
            type=value_range,
            help="eta interval as low,high (default: %(default)s)",
        )
        diagram.add_argument(
            "--gamma-range",
            type=value_range,
            help="gamma interval as low,high (default: %(default)s)",
        )
        diagram.add_argument(
            "--grid",
            type=positive_int,
            help="Grid points per axis (default: %(default)s)",
        )
        diagram.add_argument(
            "--k-samples",
            type=positive_int,
            help="Momentum samples for the winding (default: %(default)s)",
        )

        subparsers.add_parser(
            "sm-example",
            add_help=False,
            parents=[common],
            help="Worked two-level example of biorthogonal probabilities.",
        )

        table = subparsers.add_parser(
            "table-s1",
            add_help=False,
            parents=[common],
            help="Crossing counts and DTOP jumps of the quench catalog.",
        )
        table.add_argument(
            "--rows",
            help="Comma separated row labels, e.g. I-II,V-VI (default: all)",
        )
        table.add_argument(
            "--catalog",
            type=Path,
            help="Quench catalog JSON file (default: packaged catalog)",
        )
        _add_resolution_arguments(table)
        _add_branch_arguments(table)

        self.parser = parser
        self.subparsers = subparsers.choices

    def _set_defaults(self, configfilename=None) -> None:
        defaults = _to_defaults(self._load_config(configfilename))
        self.parser.set_defaults(**defaults)
        for subparser in self.subparsers.values():
            subparser.set_defaults(**defaults)

    def _load_config(self, configfile: Optional[str]) -> Dict[str, Any]:
        config = Config()

        if configfile is None:
            configpath = Path(DEFAULT_USER_CONFIG_FILE).expanduser().resolve()
            if not configpath.exists():
                logger.debug(
                    "Ignoring non existing config file %s", configpath
                )
                return config.values()
        else:
            configpath = Path(configfile).expanduser().resolve()
            if not configpath.exists():
                logger.warning(
                    "Ignoring non existing config file %s", configfile
                )
                return config.values()

        config.load(configpath)
        logger.debug("Loaded config %s", configpath)

        return config.values()

    def parse_arguments(self, args=None) -> Arguments:
        # Parse args to get the config file path passed as option
        known_args, _ = self.parser.parse_known_args(args)

        # Load the defaults from the config file if it exists.
        # This also override what was passed as cmd option.
        self._set_defaults(getattr(known_args, "config", None))

        if known_args.help:
            if getattr(known_args, "command", None):
                self.subparsers[known_args.command].print_help()
            else:
                self.parser.print_help()
            self.parser.exit(0)

        parsed = self.parser.parse_args(args)
        if parsed.command is None:
            self.parser.print_usage()
            self.parser.exit(2, "biortho-dqpt: error: a command is required\n")

        return parsed
