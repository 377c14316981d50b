# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
from typing import List

from ..models.quench import QuenchPair

logger = logging.getLogger(__name__)


class CatalogLoader:
    def load_pairs(self) -> List[QuenchPair]:
        raise NotImplementedError()
