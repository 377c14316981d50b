# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

from .__version__ import __version__
