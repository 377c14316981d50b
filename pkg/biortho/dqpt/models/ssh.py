# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Non-Hermitian Su-Schrieffer-Heeger model in momentum space

Each block is ``x_k sigma_x + y_k sigma_y`` with

    x_k = (1 + eta) + (1 - eta) cos k
    y_k = (1 - eta) sin k - i gamma / 2

The bands close (exceptional points) on the lines ``gamma = +-4`` at
``k = 0`` and ``gamma = +-4 eta`` at ``k = pi``.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Tuple

import numpy as np
from scipy.optimize import bisect

from ..complexla import ComplexLike, Mat2, principal_sqrt
from ..errors import OnBoundaryError, ValidationError

logger = logging.getLogger(__name__)

BOUNDARY_MARGIN = 1e-9
CURVE_TOLERANCE = 1e-9
WINDING_RESIDUE = 0.01
MIN_K_SAMPLES = 256
DEFAULT_K_SAMPLES = 4096


@dataclass(frozen=True)
class SshParams:
    eta: float
    gamma: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.eta) and np.isfinite(self.gamma)):
            raise ValidationError(
                f"model parameters must be finite, got eta={self.eta}, "
                f"gamma={self.gamma}"
            )

    def __str__(self) -> str:
        return f"({self.eta:g}, {self.gamma:g})"


class Region(Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"
    I_MIRROR = "I'"
    II_MIRROR = "II'"
    III_MIRROR = "III'"
    IV_MIRROR = "IV'"
    V_MIRROR = "V'"
    VI_MIRROR = "VI'"

    @property
    def is_mirror(self) -> bool:
        return self.value.endswith("'")

    def mirror(self) -> "Region":
        if self.is_mirror:
            return Region(self.value[:-1])
        return Region(self.value + "'")


@dataclass(frozen=True)
class PhaseLabel:
    region: Region
    winding: Fraction

    def __str__(self) -> str:
        return f"{self.region.value} (w = {self.winding})"


def d_vector(p: SshParams, k) -> Tuple[ComplexLike, ComplexLike]:
    k = np.asarray(k, dtype=np.float64)
    x = (1.0 + p.eta) + (1.0 - p.eta) * np.cos(k) + 0j
    y = (1.0 - p.eta) * np.sin(k) - 0.5j * p.gamma
    if k.ndim == 0:
        return complex(x), complex(y)
    return x, y


def block_hamiltonian(p: SshParams, k: float) -> Mat2:
    return block_hamiltonians(p, np.asarray([k], dtype=np.float64))[0]


def block_hamiltonians(p: SshParams, ks: np.ndarray) -> np.ndarray:
    """Stack of blocks with shape ``(len(ks), 2, 2)``."""
    x, y = d_vector(p, np.asarray(ks, dtype=np.float64))
    blocks = np.zeros((np.size(ks), 2, 2), dtype=np.complex128)
    blocks[:, 0, 1] = x - 1j * y
    blocks[:, 1, 0] = x + 1j * y
    return blocks


def dispersion(p: SshParams, k) -> ComplexLike:
    x, y = d_vector(p, k)
    return principal_sqrt(x * x + y * y)


def exceptional_gamma(
    eta: float, k: float, lower: float, upper: float, *, xtol: float = 1e-14
) -> float:
    """The gamma in [lower, upper] at which Re(eps_k^2) changes sign.

    At ``k = 0`` and ``k = pi`` the square eps_k^2 is real, so this is where
    the dispersion vanishes.
    """

    def squared(gamma: float) -> float:
        x, y = d_vector(SshParams(eta, gamma), k)
        return (x * x + y * y).real

    return bisect(squared, lower, upper, xtol=xtol, maxiter=200)


def boundary_distance(p: SshParams) -> float:
    gamma = abs(p.gamma)
    return min(abs(gamma - 4.0), abs(gamma - 4.0 * abs(p.eta)))


def _curve_winding(curve: np.ndarray) -> Fraction:
    closest = float(np.min(np.abs(curve)))
    if closest < CURVE_TOLERANCE:
        raise OnBoundaryError(
            f"curve passes {closest:.3e} from the origin, winding undefined"
        )

    increments = np.angle(np.roll(curve, -1) / curve)
    turns = float(np.sum(increments)) / (2.0 * np.pi)
    rounded = round(turns)
    if abs(turns - rounded) > WINDING_RESIDUE:
        raise OnBoundaryError(
            f"unresolved winding {turns:.4f}, increase the number of samples"
        )
    return Fraction(rounded)


def winding_number(
    p: SshParams, k_samples: int = DEFAULT_K_SAMPLES
) -> Fraction:
    """(w+ - w-) / 2 with w+- the windings of x_k +- i y_k.

    Equals the winding of arctan(y_k / x_k) over the Brillouin zone.
    """
    if k_samples < MIN_K_SAMPLES:
        raise ValidationError(
            f"k_samples must be >= {MIN_K_SAMPLES}, got {k_samples}"
        )

    ks = 2.0 * np.pi * np.arange(k_samples) / k_samples
    x, y = d_vector(p, ks)
    w_plus = _curve_winding(x + 1j * y)
    w_minus = _curve_winding(x - 1j * y)
    return (w_plus - w_minus) / 2


def classify_phase(
    p: SshParams,
    *,
    margin: float = BOUNDARY_MARGIN,
    k_samples: int = DEFAULT_K_SAMPLES,
) -> PhaseLabel:
    distance = boundary_distance(p)
    if distance <= margin:
        raise OnBoundaryError(
            f"parameters {p} lie on a phase boundary "
            f"(distance {distance:.3e} to gamma = 4 or gamma = 4|eta|)"
        )

    gamma = abs(p.gamma)
    if gamma > 4.0:
        regions = (Region.I, Region.II, Region.III)
    else:
        regions = (Region.IV, Region.V, Region.VI)

    if p.eta < -gamma / 4.0:
        region = regions[0]
    elif p.eta > gamma / 4.0:
        region = regions[2]
    else:
        region = regions[1]

    if p.gamma < 0.0:
        region = region.mirror()

    return PhaseLabel(region=region, winding=winding_number(p, k_samples))
