# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
import os
import tempfile
import unittest
from logging.handlers import WatchedFileHandler
from pathlib import Path
from unittest.mock import patch

from biortho.dqpt.utils import (
    create_lock,
    file_sha256,
    init_logging,
    remove_lock,
    worker_count,
)


class WorkerCountTestCase(unittest.TestCase):
    @patch("biortho.dqpt.utils.psutil")
    def test_worker_count(self, psutil_mock):
        psutil_mock.cpu_count.return_value = 8

        self.assertEqual(worker_count(), 8)
        self.assertEqual(worker_count(""), 8)
        self.assertEqual(worker_count(3), 3)
        self.assertEqual(worker_count("2"), 2)
        self.assertEqual(worker_count(20), 8)
        self.assertEqual(worker_count(0), 1)

    @patch("biortho.dqpt.utils.psutil")
    def test_invalid_thread_count(self, psutil_mock):
        psutil_mock.cpu_count.return_value = 4

        with self.assertLogs("biortho.dqpt.utils", level="WARNING"):
            self.assertEqual(worker_count("many"), 4)

    @patch("biortho.dqpt.utils.psutil")
    def test_unknown_cpu_count(self, psutil_mock):
        psutil_mock.cpu_count.return_value = None

        self.assertEqual(worker_count(), 1)


class LockTestCase(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.lock = Path(self.directory.name) / "run.lock"

    def tearDown(self):
        self.directory.cleanup()

    def test_create_and_remove(self):
        self.assertTrue(create_lock(self.lock))
        self.assertEqual(self.lock.read_text(), str(os.getpid()))

        remove_lock(self.lock)

        self.assertFalse(self.lock.exists())

    def test_lock_held_by_this_process(self):
        self.assertTrue(create_lock(self.lock))

        with self.assertLogs("biortho.dqpt.utils", level="ERROR"):
            self.assertFalse(create_lock(self.lock))

    def test_stale_lock_is_replaced(self):
        self.lock.write_text("garbage")

        self.assertTrue(create_lock(self.lock))
        self.assertEqual(self.lock.read_text(), str(os.getpid()))

    def test_foreign_lock_is_kept(self):
        self.lock.write_text(str(os.getpid() + 1))

        remove_lock(self.lock)

        self.assertTrue(self.lock.exists())

    def test_missing_directory(self):
        with self.assertLogs("biortho.dqpt.utils", level="ERROR"):
            self.assertFalse(create_lock(self.lock.parent / "a" / "b.lock"))


class FileSha256TestCase(unittest.TestCase):
    def test_digest(self):
        with tempfile.NamedTemporaryFile() as fp:
            fp.write(b"abc")
            fp.flush()

            self.assertEqual(
                file_sha256(Path(fp.name)),
                "ba7816bf8f01cfea414140de5dae2223"
                "b00361a396177a9cb410ff61f20015ad",
            )


class InitLoggingTestCase(unittest.TestCase):
    def setUp(self):
        self.root = logging.getLogger()
        self.handlers = list(self.root.handlers)
        self.level = self.root.level

    def tearDown(self):
        for handler in self.root.handlers:
            if handler not in self.handlers:
                handler.close()
        self.root.handlers = self.handlers
        self.root.setLevel(self.level)

    def test_console(self):
        logger = init_logging("biortho-dqpt", "DEBUG")

        self.assertIs(logger, self.root)
        self.assertEqual(logger.level, logging.DEBUG)
        self.assertEqual(len(logger.handlers), len(self.handlers) + 1)

    def test_log_file(self):
        with tempfile.TemporaryDirectory() as directory:
            log_file = str(Path(directory) / "run.log")

            logger = init_logging("biortho-dqpt", "INFO", log_file=log_file)
            logging.getLogger("biortho.dqpt.test").info("hello")

            file_handlers = [
                handler
                for handler in logger.handlers
                if isinstance(handler, WatchedFileHandler)
            ]
            self.assertEqual(len(file_handlers), 1)
            file_handlers[0].flush()
            content = Path(log_file).read_text()
            self.assertIn(
                "biortho-dqpt: INFO: (biortho.dqpt.test) hello", content
            )
            file_handlers[0].close()
