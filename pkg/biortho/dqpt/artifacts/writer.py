# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Output directory of a single run

Files are written under a ``.partial`` name and renamed once complete. The
manifest goes last; its presence marks a finished run.
"""

import csv
import json
import logging
import numbers
import os
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from ..errors import RunDirectoryLockedError, ValidationError
from ..utils import LOCK_FILE_NAME, create_lock, file_sha256, remove_lock
from .manifest import RunManifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
PARTIAL_SUFFIX = ".partial"


def format_real(value: float) -> str:
    return f"{value:.16e}"


def format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (numbers.Integral, str, Fraction)):
        return str(value)
    if value is None:
        return ""
    return format_real(float(value))


class RunDirectory:
    def __init__(self, path: Path) -> None:
        self.path = Path(path)
        self._lock_path = self.path / LOCK_FILE_NAME
        self._outputs: List[str] = []
        self._started = time.monotonic()
        self._locked = False

    def __enter__(self) -> "RunDirectory":
        try:
            self.path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ValidationError(
                f"cannot create output directory {self.path}: {e}"
            ) from e

        if not create_lock(self._lock_path):
            raise RunDirectoryLockedError(
                f"output directory {self.path.absolute()} is in use"
            )
        self._locked = True
        # incomplete until finalize writes a fresh manifest
        (self.path / MANIFEST_NAME).unlink(missing_ok=True)
        self._started = time.monotonic()
        return self

    def __exit__(self, *exc_info) -> None:
        if self._locked:
            remove_lock(self._lock_path)
            self._locked = False

    @property
    def outputs(self) -> List[str]:
        return list(self._outputs)

    def _commit(self, name: str, partial: Path) -> Path:
        target = self.path / name
        os.replace(partial, target)
        self._outputs.append(name)
        logger.debug("Wrote %s", target)
        return target

    def write_csv(
        self,
        name: str,
        header: Sequence[str],
        rows: Iterable[Sequence[Any]],
    ) -> Path:
        partial = self.path / f"{name}{PARTIAL_SUFFIX}"
        with partial.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(value) for value in row])
        return self._commit(name, partial)

    def write_json(self, name: str, data: Dict[str, Any]) -> Path:
        partial = self.path / f"{name}{PARTIAL_SUFFIX}"
        partial.write_text(
            json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return self._commit(name, partial)

    def finalize(
        self, command: str, spec: Optional[Dict[str, Any]] = None
    ) -> RunManifest:
        manifest = RunManifest(
            command=command,
            spec=spec,
            wall_time=time.monotonic() - self._started,
            outputs=self._outputs,
            checksums={
                name: file_sha256(self.path / name) for name in self._outputs
            },
        )
        partial = self.path / f"{MANIFEST_NAME}{PARTIAL_SUFFIX}"
        partial.write_text(manifest.dump() + "\n", encoding="utf-8")
        os.replace(partial, self.path / MANIFEST_NAME)
        logger.info(
            "Run %s finished in %.2f s, outputs in %s",
            manifest.run_id,
            manifest.wall_time,
            self.path,
        )
        return manifest
