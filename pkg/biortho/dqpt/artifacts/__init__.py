# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

from .manifest import RunManifest
from .writer import RunDirectory, format_real
