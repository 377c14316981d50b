# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import json
import logging
from fractions import Fraction
from json.decoder import JSONDecodeError
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..errors import CatalogLoadingError, ValidationError
from ..models.quench import QuenchPair, QuenchProfile
from ..models.ssh import SshParams
from .loader import CatalogLoader

logger = logging.getLogger(__name__)

DEFAULT_CATALOG_PATH = Path(__file__).parent / "quench_catalog.json"


def _parse_params(data: Dict[str, Any]) -> SshParams:
    return SshParams(eta=float(data["eta"]), gamma=float(data["gamma"]))


def _parse_profile(data: Optional[Dict[str, Any]]) -> Optional[QuenchProfile]:
    if data is None:
        return None
    return QuenchProfile(
        crossing_counts=frozenset(int(count) for count in data["crossings"]),
        jump_sizes=frozenset(Fraction(str(jump)) for jump in data["jumps"]),
    )


class JSONCatalogLoader(CatalogLoader):
    def __init__(self, catalog_path: Path = DEFAULT_CATALOG_PATH):
        self._catalog_path = catalog_path

    def __load_data(self) -> Dict[str, Any]:
        if not self._catalog_path.exists():
            raise CatalogLoadingError(
                f"Could not load quench catalog from "
                f"{self._catalog_path.absolute()}. File does not exist."
            )

        if self._catalog_path.stat().st_size < 2:
            # the minimum size of a json file is 2 bytes ({} or [])
            logger.warning("Quench catalog %s is empty.", self._catalog_path)
            return {}

        with self._catalog_path.open("r", encoding="utf-8") as f:
            try:
                return json.load(f)
            except JSONDecodeError as e:
                raise CatalogLoadingError(
                    "Could not load quench catalog from "
                    f"{self._catalog_path.absolute()}. Error in line "
                    f"{e.lineno} while decoding JSON data."
                ) from None

    def load_pairs(self) -> List[QuenchPair]:
        data = self.__load_data()
        if not isinstance(data, dict):
            raise CatalogLoadingError(
                f"{self._catalog_path.absolute()} does not contain a catalog "
                "object."
            )

        pairs = []
        for row in data.get("rows", []):
            try:
                pair = QuenchPair(
                    label=str(row["label"]),
                    first=_parse_params(row["first"]),
                    second=_parse_params(row["second"]),
                    forward=_parse_profile(row.get("forward")),
                    reverse=_parse_profile(row.get("reverse")),
                )
            except (
                AttributeError,
                KeyError,
                TypeError,
                ValueError,
                ZeroDivisionError,
                ValidationError,
            ) as e:
                logger.warning(
                    "Error while parsing catalog row %s in %s. Error was %s",
                    row,
                    self._catalog_path,
                    e,
                )
                continue
            pairs.append(pair)

        logger.debug(
            "Loaded %d quench pairs from %s", len(pairs), self._catalog_path
        )
        return pairs
