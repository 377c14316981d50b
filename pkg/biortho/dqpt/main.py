# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
import os
import sys
from typing import List, Optional

from .__version__ import __version__
from .cli import CliParser
from .commands import COMMANDS
from .engine import DqptEngine
from .errors import (
    BiorthoDqptError,
    CatalogLoadingError,
    ConfigFileError,
    ExceptionalPointError,
    OnBoundaryError,
    RunDirectoryLockedError,
    ValidationError,
)
from .utils import init_logging, worker_count

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_REFUSED = 3

SENTRY_DSN_BIORTHO_DQPT = os.environ.get("SENTRY_DSN_BIORTHO_DQPT")
if SENTRY_DSN_BIORTHO_DQPT:
    import sentry_sdk  # pylint: disable=import-error

    sentry_sdk.init(  # pylint: disable=abstract-class-instantiated
        SENTRY_DSN_BIORTHO_DQPT,
        traces_sample_rate=1.0,
        server_name=os.environ.get("SENTRY_SERVER_NAME"),
        environment=os.environ.get("SENTRY_ENVIRONMENT"),
    )


def run(args: Optional[List[str]] = None) -> int:
    """Parse ``args``, run the selected command and return its exit status."""
    parser = CliParser()
    try:
        arguments = parser.parse_arguments(args)
    except ConfigFileError as e:
        parser.parser.exit(EXIT_INVALID, f"biortho-dqpt: error: {e}\n")

    init_logging(
        "biortho-dqpt", arguments.log_level, log_file=arguments.log_file
    )
    engine = DqptEngine(workers=worker_count(arguments.threads))
    logger.debug(
        "Starting biortho-dqpt version %s with %d workers.",
        __version__,
        engine.workers,
    )

    try:
        return COMMANDS[arguments.command](arguments, engine)
    except (
        ValidationError,
        RunDirectoryLockedError,
        CatalogLoadingError,
    ) as e:
        logger.error("%s", e)
        return EXIT_INVALID
    except (OnBoundaryError, ExceptionalPointError) as e:
        logger.error("Refusing to run: %s", e)
        return EXIT_REFUSED
    except BiorthoDqptError as e:
        logger.error("Numerical failure: %s", e)
        return EXIT_FAILURE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
