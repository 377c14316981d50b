# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from io import StringIO
from unittest.mock import MagicMock, patch

from biortho.dqpt.errors import (
    CatalogLoadingError,
    ExceptionalPointError,
    GridTooCoarseError,
    OnBoundaryError,
    ValidationError,
)
from biortho.dqpt.main import (
    EXIT_FAILURE,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_REFUSED,
    run,
)


@patch.dict("os.environ", {}, clear=True)
@patch("biortho.dqpt.main.init_logging")
class RunTestCase(unittest.TestCase):
    def run_command(self, error=None, status=EXIT_OK):
        command = MagicMock(return_value=status, side_effect=error)
        with patch.dict("biortho.dqpt.main.COMMANDS", {"quench": command}):
            result = run(["quench", "--threads=1"])
        return result, command

    def test_success(self, init_logging_mock):
        result, command = self.run_command()

        self.assertEqual(result, EXIT_OK)
        arguments, engine = command.call_args.args
        self.assertEqual(arguments.command, "quench")
        self.assertEqual(engine.workers, 1)
        init_logging_mock.assert_called_once_with(
            "biortho-dqpt", "INFO", log_file=None
        )

    def test_command_status_is_returned(self, _):
        self.assertEqual(self.run_command(status=EXIT_FAILURE)[0], 1)

    def test_invalid_input(self, _):
        for error in (
            ValidationError("missing quench parameters"),
            CatalogLoadingError("no catalog"),
        ):
            with self.subTest(error=type(error).__name__):
                self.assertEqual(self.run_command(error)[0], EXIT_INVALID)

    def test_refused(self, _):
        for error in (
            OnBoundaryError("on the boundary"),
            ExceptionalPointError("exceptional point", k=0.0),
        ):
            with self.subTest(error=type(error).__name__):
                self.assertEqual(self.run_command(error)[0], EXIT_REFUSED)

    def test_numerical_failure(self, _):
        result, _ = self.run_command(GridTooCoarseError("increase cells"))

        self.assertEqual(result, EXIT_FAILURE)

    def test_invalid_config_file(self, _):
        with tempfile.NamedTemporaryFile(suffix=".toml") as fp:
            fp.write(b"[biortho-dqpt]\ncells = \n")
            fp.flush()

            with redirect_stderr(StringIO()), redirect_stdout(StringIO()):
                with self.assertRaises(SystemExit) as cm:
                    run(["quench", "-c", fp.name])

        self.assertEqual(cm.exception.code, EXIT_INVALID)
