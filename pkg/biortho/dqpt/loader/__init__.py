# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

from .json import DEFAULT_CATALOG_PATH, JSONCatalogLoader
from .loader import CatalogLoader
