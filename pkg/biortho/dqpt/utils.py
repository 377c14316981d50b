# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import hashlib
import logging
import os
from logging.handlers import WatchedFileHandler
from pathlib import Path
from typing import Optional, Union

import psutil

logger = logging.getLogger(__name__)

LOCK_FILE_NAME = ".biortho-dqpt.lock"


def init_logging(
    name: str,
    log_level: Union[int, str],
    *,
    log_file: Optional[str] = None,
):
    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    formatter = logging.Formatter(
        f"%(asctime)s {name}: %(levelname)s: (%(name)s) %(message)s"
    )
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)
    if log_file:
        log_file_handler = WatchedFileHandler(log_file)
        log_file_handler.setFormatter(formatter)
        root_logger.addHandler(log_file_handler)

    return root_logger


def worker_count(threads: Optional[Union[int, str]] = None) -> int:
    """Number of engine workers: the configured cap, else all logical CPUs."""
    available = psutil.cpu_count(logical=True) or 1
    if threads is None or threads == "":
        return available

    try:
        cap = int(threads)
    except (TypeError, ValueError):
        logger.warning(
            "Ignoring invalid thread count %r, using %d workers",
            threads,
            available,
        )
        return available

    return max(1, min(cap, available))


def create_lock(lock_file: Union[str, Path]) -> bool:
    """Check if another process owns the run directory and create the lock
    file. Otherwise gives an error."""

    pid = os.getpid()
    new_process_name = psutil.Process(pid).name()

    lock_path = Path(lock_file)

    if lock_path.is_file():
        process_name = None
        current_pid = lock_path.read_text(encoding="utf-8").strip()
        try:
            current_pid = int(current_pid)
        except (TypeError, ValueError):
            current_pid = None

        if current_pid:
            try:
                process_name = psutil.Process(current_pid).name()
            except psutil.NoSuchProcess:
                pass

            if process_name == new_process_name:
                logger.error(
                    "Another run writes into this directory. See %s.",
                    str(lock_path.absolute()),
                )
                return False

            logger.debug(
                "There is an existing lock file '%s', but the PID %s belongs"
                " to the process %s. It seems that a run was abruptly stopped."
                " Replacing the lock file.",
                str(lock_path.absolute()),
                current_pid,
                process_name,
            )

    try:
        lock_path.write_text(str(pid), encoding="utf-8")
    except (FileNotFoundError, PermissionError) as e:
        logger.error(
            "Failed to create lock file %s. %s", str(lock_path.absolute()), e
        )
        return False

    return True


def remove_lock(lock_file: Union[str, Path]) -> None:
    """Removes the lock file if it belongs to this process."""
    lock_path = Path(lock_file)

    if not lock_path.is_file():
        return

    try:
        owner = int(lock_path.read_text(encoding="utf-8").strip())
    except ValueError:
        owner = None

    if owner == os.getpid():
        logger.debug("Releasing lock %s", lock_path)
        lock_path.unlink()


def file_sha256(path: Path) -> str:
    sha256 = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            sha256.update(chunk)
    return sha256.hexdigest()
