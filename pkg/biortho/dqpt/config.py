# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Module to store biortho-dqpt configuration settings
"""

import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict

from biortho.dqpt.errors import ConfigFileError

if sys.version_info >= (3, 11):
    import tomllib as toml
else:
    import tomli as toml

logger = logging.getLogger(__name__)

CONFIG_SECTION = "biortho-dqpt"

DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_CELLS = 2000
DEFAULT_T_MAX = 5.0
DEFAULT_T_STEPS = 2000
DEFAULT_QUAD_STEPS = 512
DEFAULT_N_MIN = 0
DEFAULT_N_MAX = 6
DEFAULT_K_SAMPLES = 2000
DEFAULT_ETA_RANGE = "-3,3"
DEFAULT_GAMMA_RANGE = "0,6"
DEFAULT_GRID = 121
DEFAULT_OUT = "."

_CONFIG = (
    ("log-file", "BIORTHO_DQPT_LOG_FILE", None),
    ("log-level", "BIORTHO_DQPT_LOG_LEVEL", DEFAULT_LOG_LEVEL),
    ("threads", "BIORTHO_DQPT_THREADS", None),
    ("eta-i", "BIORTHO_DQPT_ETA_I", None),
    ("gamma-i", "BIORTHO_DQPT_GAMMA_I", None),
    ("eta-f", "BIORTHO_DQPT_ETA_F", None),
    ("gamma-f", "BIORTHO_DQPT_GAMMA_F", None),
    ("cells", "BIORTHO_DQPT_CELLS", DEFAULT_CELLS),
    ("t-max", "BIORTHO_DQPT_T_MAX", DEFAULT_T_MAX),
    ("t-steps", "BIORTHO_DQPT_T_STEPS", DEFAULT_T_STEPS),
    ("quad-steps", "BIORTHO_DQPT_QUAD_STEPS", DEFAULT_QUAD_STEPS),
    ("n-min", "BIORTHO_DQPT_N_MIN", DEFAULT_N_MIN),
    ("n-max", "BIORTHO_DQPT_N_MAX", DEFAULT_N_MAX),
    ("k-samples", "BIORTHO_DQPT_K_SAMPLES", DEFAULT_K_SAMPLES),
    ("eta-range", "BIORTHO_DQPT_ETA_RANGE", DEFAULT_ETA_RANGE),
    ("gamma-range", "BIORTHO_DQPT_GAMMA_RANGE", DEFAULT_GAMMA_RANGE),
    ("grid", "BIORTHO_DQPT_GRID", DEFAULT_GRID),
    ("rows", "BIORTHO_DQPT_ROWS", None),
    ("catalog", "BIORTHO_DQPT_CATALOG", None),
    ("out", "BIORTHO_DQPT_OUT", DEFAULT_OUT),
)


_LIST_KEYS = ("eta-range", "gamma-range", "rows")


def _flatten(key: str, value: Any) -> Any:
    # argparse only converts string defaults
    if key in _LIST_KEYS and isinstance(value, (list, tuple)):
        return ",".join(str(item) for item in value)
    return value


class Config:
    def __init__(self) -> None:
        self._config: Dict[str, Any] = {}

    def load(self, filepath: Path) -> None:
        """Read a TOML config file.

        Keys are taken from a ``[biortho-dqpt]`` table if the file has one,
        otherwise from the flat top level. Ranges and row lists may be given
        as arrays.
        """
        try:
            config_data = toml.loads(filepath.read_text(encoding="utf-8"))
        except IOError as e:
            raise ConfigFileError(
                f"Can't read config file {filepath.absolute()}: {e}"
            ) from e
        except toml.TOMLDecodeError as e:
            raise ConfigFileError(
                f"Config file {filepath.absolute()} is not valid TOML: {e}"
            ) from e

        section = config_data.get(CONFIG_SECTION)
        if not isinstance(section, dict):
            section = {
                key: value
                for key, value in config_data.items()
                if not isinstance(value, dict)
            }

        known = {key for key, _, _ in _CONFIG}
        self._config = {}
        for key, value in section.items():
            if key not in known:
                logger.debug("Ignoring unknown config key %s", key)
                continue
            self._config[key] = _flatten(key, value)

    def values(self) -> Dict[str, Any]:
        """Settings with precedence environment, file, built-in default."""
        values = {}

        for key, env_key, default in _CONFIG:
            if env_key in os.environ:
                values[key] = os.environ[env_key]
            else:
                values[key] = self._config.get(key, default)

        return values
