# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Biorthogonal eigenstructure of off-diagonal two-level Hamiltonians

For ``h = [[0, a], [b, 0]]`` the eigenvalues are ``+eps`` and ``-eps`` with
``eps = principal_sqrt(a b)``. The canonical gauge is

    u_n = (s_n eps / b, 1) / sqrt(2)
    w_n = (s_n conj(b / eps), 1) / sqrt(2)

with ``s_+ = 1`` and ``s_- = -1``. ``eps / b`` is the square root of ``a / b``
that belongs to the eigenvalue ``eps``, and ``<w_m|u_n> = delta_mn``.

Frames are stored as 2x2 arrays whose columns are the vectors of the
``+`` (index 0) and ``-`` (index 1) bands.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import numpy.typing as npt

from .complexla import (
    EXCEPTIONAL_THRESHOLD,
    RESIDUE_TOLERANCE,
    TRACE_TOLERANCE,
    ComplexScalar,
    Mat2,
    Vec2,
    as_mat2,
    as_vec2,
    checked_real,
    principal_sqrt,
    traceless_exp,
)
from .errors import ExceptionalPointError, UnsupportedFormError, ZeroNormError

logger = logging.getLogger(__name__)

PLUS = 0
MINUS = 1

ZERO_NORM = 1e-14

_SQRT_HALF = np.sqrt(0.5)


def biorthogonal_frames(
    hamiltonians: npt.ArrayLike,
    *,
    diagonal_tolerance: float = TRACE_TOLERANCE,
    threshold: float = EXCEPTIONAL_THRESHOLD,
    momenta: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised canonical bases for a stack of Hamiltonians.

    Returns ``(eps, right, left)`` with shapes ``(...)``, ``(..., 2, 2)`` and
    ``(..., 2, 2)``. ``momenta`` only labels errors.
    """
    h = np.asarray(hamiltonians, dtype=np.complex128)
    scale = np.linalg.norm(h, axis=(-2, -1))
    diagonal = np.maximum(np.abs(h[..., 0, 0]), np.abs(h[..., 1, 1]))
    bad = diagonal > diagonal_tolerance * np.maximum(scale, 1.0)
    if np.any(bad):
        raise UnsupportedFormError(
            "only off-diagonal Hamiltonians (d_z = 0) are supported, "
            f"diagonal entry {float(np.max(diagonal)):.3e}"
            + _where(bad, momenta)
        )

    a = h[..., 0, 1]
    b = h[..., 1, 0]
    eps = np.asarray(principal_sqrt(a * b))
    exceptional = (np.abs(eps) <= threshold * scale) | (scale == 0.0)
    if np.any(exceptional):
        k = _first(exceptional, momenta)
        raise ExceptionalPointError(
            f"eigenvalue {complex(eps[exceptional].flat[0]):.3e} is below the "
            "exceptional-point threshold" + _where(exceptional, momenta),
            k=k,
        )

    ratio = eps / b
    left_ratio = np.conj(b / eps)
    ones = np.ones_like(ratio)

    right = np.empty(h.shape, dtype=np.complex128)
    right[..., 0, PLUS] = ratio
    right[..., 0, MINUS] = -ratio
    right[..., 1, PLUS] = ones
    right[..., 1, MINUS] = ones
    right *= _SQRT_HALF

    left = np.empty(h.shape, dtype=np.complex128)
    left[..., 0, PLUS] = left_ratio
    left[..., 0, MINUS] = -left_ratio
    left[..., 1, PLUS] = ones
    left[..., 1, MINUS] = ones
    left *= _SQRT_HALF

    return eps, right, left


def _first(mask: np.ndarray, momenta: Optional[np.ndarray]) -> Optional[float]:
    if momenta is None:
        return None
    return float(np.asarray(momenta)[mask].flat[0])


def _where(mask: np.ndarray, momenta: Optional[np.ndarray]) -> str:
    k = _first(mask, momenta)
    return "" if k is None else f" at k = {k:.12g}"


@dataclass(frozen=True, eq=False)
class BiorthoBasis:
    """Right and left eigenvectors of a Hamiltonian with eigenvalues +-eps"""

    e_plus: ComplexScalar
    e_minus: ComplexScalar
    u_plus: Vec2
    u_minus: Vec2
    w_plus: Vec2
    w_minus: Vec2

    @classmethod
    def from_frames(
        cls, eps: complex, right: np.ndarray, left: np.ndarray
    ) -> "BiorthoBasis":
        return cls(
            e_plus=complex(eps),
            e_minus=-complex(eps),
            u_plus=right[:, PLUS].copy(),
            u_minus=right[:, MINUS].copy(),
            w_plus=left[:, PLUS].copy(),
            w_minus=left[:, MINUS].copy(),
        )

    @property
    def right(self) -> np.ndarray:
        return np.column_stack((self.u_plus, self.u_minus))

    @property
    def left(self) -> np.ndarray:
        return np.column_stack((self.w_plus, self.w_minus))

    def regauge(self, theta_plus: float, theta_minus: float) -> "BiorthoBasis":
        """Multiply both vectors of each band by a common phase."""
        plus = np.exp(1j * theta_plus)
        minus = np.exp(1j * theta_minus)
        return BiorthoBasis(
            e_plus=self.e_plus,
            e_minus=self.e_minus,
            u_plus=plus * self.u_plus,
            u_minus=minus * self.u_minus,
            w_plus=plus * self.w_plus,
            w_minus=minus * self.w_minus,
        )

    def rescale(self, lam_plus: complex, lam_minus: complex) -> "BiorthoBasis":
        """u_n -> lam_n u_n and w_n -> w_n / conj(lam_n)."""
        return BiorthoBasis(
            e_plus=self.e_plus,
            e_minus=self.e_minus,
            u_plus=lam_plus * self.u_plus,
            u_minus=lam_minus * self.u_minus,
            w_plus=self.w_plus / np.conj(lam_plus),
            w_minus=self.w_minus / np.conj(lam_minus),
        )


@dataclass(frozen=True)
class Decomposition:
    c_plus: ComplexScalar
    c_minus: ComplexScalar

    def as_array(self) -> np.ndarray:
        return np.array([self.c_plus, self.c_minus], dtype=np.complex128)

    def weight(self) -> float:
        return abs(self.c_plus) ** 2 + abs(self.c_minus) ** 2


def eig_biortho(
    h: Mat2,
    *,
    diagonal_tolerance: float = TRACE_TOLERANCE,
    threshold: float = EXCEPTIONAL_THRESHOLD,
) -> BiorthoBasis:
    eps, right, left = biorthogonal_frames(
        as_mat2(h)[np.newaxis],
        diagonal_tolerance=diagonal_tolerance,
        threshold=threshold,
    )
    return BiorthoBasis.from_frames(eps[0], right[0], left[0])


def decompose(psi: Vec2, basis: BiorthoBasis) -> Decomposition:
    psi = as_vec2(psi)
    return Decomposition(
        c_plus=complex(np.vdot(basis.w_plus, psi)),
        c_minus=complex(np.vdot(basis.w_minus, psi)),
    )


def associated_state(psi: Vec2, basis: BiorthoBasis) -> Vec2:
    c = decompose(psi, basis)
    return c.c_plus * basis.w_plus + c.c_minus * basis.w_minus


def biortho_inner(psi: Vec2, phi: Vec2, basis: BiorthoBasis) -> ComplexScalar:
    """<phi~|psi>, the sum of conj(d_n) c_n."""
    c = decompose(psi, basis)
    d = decompose(phi, basis)
    return complex(np.vdot(d.as_array(), c.as_array()))


def transition_probability(
    psi: Vec2,
    phi: Vec2,
    basis: BiorthoBasis,
    *,
    tolerance: float = RESIDUE_TOLERANCE,
) -> float:
    norm_psi = biortho_inner(psi, psi, basis)
    norm_phi = biortho_inner(phi, phi, basis)
    if abs(norm_psi) < ZERO_NORM or abs(norm_phi) < ZERO_NORM:
        raise ZeroNormError(
            f"biorthogonal norms {abs(norm_psi):.3e} and {abs(norm_phi):.3e} "
            f"must both exceed {ZERO_NORM:.0e}"
        )

    value = (
        biortho_inner(phi, psi, basis)
        * biortho_inner(psi, phi, basis)
        / (norm_psi * norm_phi)
    )
    probability = checked_real(
        value, tolerance=tolerance, label="transition probability"
    )
    return min(max(probability, 0.0), 1.0)


def projection_probabilities(
    psi: Vec2, basis: BiorthoBasis
) -> Tuple[float, float]:
    c = decompose(psi, basis)
    total = c.weight()
    if total < ZERO_NORM:
        raise ZeroNormError(f"state weight {total:.3e} vanishes")
    return abs(c.c_plus) ** 2 / total, abs(c.c_minus) ** 2 / total


def naive_left_state(hf: Mat2, basis: BiorthoBasis, t: float) -> Vec2:
    """exp(-i hf^dagger t) w_plus, a left vector evolved like a ket."""
    return traceless_exp(np.conj(as_mat2(hf)).T, t) @ basis.w_plus


def naive_left_evolution_diagnostic(
    hf: Mat2, basis_i: BiorthoBasis, phi: Vec2, t: float
) -> ComplexScalar:
    """Transition probability with the left state evolved by exp(-i H^dagger t).

    The value is generally complex and is returned unchecked.
    """
    phi = as_vec2(phi)
    psi = traceless_exp(hf, t) @ basis_i.u_plus
    left = naive_left_state(hf, basis_i, t)
    phi_left = associated_state(phi, basis_i)
    numerator = np.vdot(left, phi) * np.vdot(phi_left, psi)
    denominator = np.vdot(left, psi) * np.vdot(phi_left, phi)
    return complex(numerator / denominator)
