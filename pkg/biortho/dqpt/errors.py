# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""Module for biortho-dqpt errors"""

from typing import Optional


class BiorthoDqptError(Exception):
    """Base Class for errors raised in biortho-dqpt"""


class NonTracelessError(BiorthoDqptError):
    """A Hamiltonian with a non-vanishing trace was passed"""


class ExceptionalPointError(BiorthoDqptError):
    """The eigenvalue vanishes and the block is not diagonalizable"""

    def __init__(self, message: str, k: Optional[float] = None) -> None:
        super().__init__(message)
        self.k = k


class UnsupportedFormError(BiorthoDqptError):
    """The Hamiltonian has diagonal entries (d_z != 0)"""


class ZeroNormError(BiorthoDqptError):
    """A biorthogonal norm vanishes"""


class ComplexResidueError(BiorthoDqptError):
    """A quantity which must be real carries an imaginary part"""


class AtanhSingularError(BiorthoDqptError):
    """The overlap kernel equals +1 or -1 and no finite zero exists"""


class QuadratureResidueError(BiorthoDqptError):
    """The dynamical phase keeps an imaginary residue after quadrature"""


class PhaseStepTooLargeError(BiorthoDqptError):
    """The time grid is too coarse to track a phase continuously"""


class GridTooCoarseError(BiorthoDqptError):
    """The momentum grid is too coarse to resolve the geometric phase"""


class OnBoundaryError(BiorthoDqptError):
    """The parameters lie on a phase boundary"""


class ValidationError(BiorthoDqptError, ValueError):
    """An invalid parameter or option value was passed"""


class ConfigFileError(BiorthoDqptError):
    """A problem while parsing the config file has occurred"""


class CatalogLoadingError(BiorthoDqptError):
    """A problem while loading the quench catalog has occurred"""


class ManifestParsingError(BiorthoDqptError):
    """A problem while parsing a run manifest"""


class RunDirectoryLockedError(BiorthoDqptError):
    """Another run is writing into the same output directory"""
