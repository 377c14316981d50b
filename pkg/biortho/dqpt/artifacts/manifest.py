# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""Run manifest written last into every output directory"""

import json
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Union
from uuid import UUID, uuid4

from ..__version__ import __version__
from ..errors import ManifestParsingError


class RunManifest:
    def __init__(
        self,
        *,
        command: str,
        spec: Optional[Dict[str, Any]] = None,
        tool_version: str = __version__,
        wall_time: float = 0.0,
        outputs: Optional[List[str]] = None,
        checksums: Optional[Dict[str, str]] = None,
        run_id: Optional[UUID] = None,
        created: Optional[datetime] = None,
    ):
        self.command = command
        self.spec = spec if spec else {}
        self.tool_version = tool_version
        self.wall_time = wall_time
        self.outputs = list(outputs) if outputs else []
        self.checksums = dict(checksums) if checksums else {}
        self.run_id = run_id if run_id else uuid4()
        self.created = created if created else datetime.now(timezone.utc)

    @classmethod
    def _parse(cls, data: Dict[str, Any]) -> Dict[str, Any]:
        command = data.get("command")
        if not isinstance(command, str) or not command:
            raise ManifestParsingError("error while parsing 'command'")

        try:
            run_id = UUID(data.get("run_id"))
        except (TypeError, ValueError) as e:
            raise ManifestParsingError(
                f"error while parsing 'run_id', {e}"
            ) from e
        try:
            created = datetime.fromtimestamp(
                float(data.get("created")), timezone.utc
            )
        except (TypeError, ValueError) as e:
            raise ManifestParsingError(
                f"error while parsing 'created', {e}"
            ) from e
        try:
            wall_time = float(data.get("wall_time", 0.0))
        except (TypeError, ValueError) as e:
            raise ManifestParsingError(
                f"error while parsing 'wall_time', {e}"
            ) from e

        outputs = data.get("outputs", [])
        checksums = data.get("checksums", {})
        if not isinstance(outputs, list) or not isinstance(checksums, dict):
            raise ManifestParsingError(
                "'outputs' must be a list and 'checksums' a mapping"
            )

        return {
            "command": command,
            "spec": data.get("spec") or {},
            "tool_version": str(data.get("tool_version", "")),
            "wall_time": wall_time,
            "outputs": outputs,
            "checksums": checksums,
            "run_id": run_id,
            "created": created,
        }

    def serialize(self) -> Dict[str, Any]:
        return {
            "run_id": str(self.run_id),
            "command": self.command,
            "spec": self.spec,
            "tool_version": self.tool_version,
            "wall_time": self.wall_time,
            "outputs": self.outputs,
            "checksums": self.checksums,
            "created": self.created.timestamp(),
        }

    @classmethod
    def deserialize(cls, data: Dict[str, Any]) -> "RunManifest":
        kwargs = cls._parse(data)
        return cls(**kwargs)

    @classmethod
    def load(cls, payload: Union[str, bytes]) -> "RunManifest":
        try:
            data = json.loads(payload)
        except ValueError as e:
            raise ManifestParsingError(
                f"manifest is not valid JSON, {e}"
            ) from e
        if not isinstance(data, dict):
            raise ManifestParsingError("manifest must be a JSON object")
        return cls.deserialize(data)

    def dump(self) -> str:
        return json.dumps(self.serialize(), indent=2, sort_keys=True)

    def __str__(self) -> str:
        return self.dump()
