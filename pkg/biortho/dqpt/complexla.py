# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Closed-form complex linear algebra for traceless two-level Hamiltonians.

Matrices are complex numpy arrays of shape (2, 2), row-major in the basis
{a, b}: ``h[0, 1]`` couples b into a. Vectors have shape (2,). Functions that
take scalars also accept arrays and then work elementwise.
"""

import logging
from typing import Union

import numpy as np
import numpy.typing as npt

from .errors import ComplexResidueError, NonTracelessError

logger = logging.getLogger(__name__)

ComplexScalar = complex
Mat2 = npt.NDArray[np.complex128]
Vec2 = npt.NDArray[np.complex128]
ComplexLike = Union[complex, npt.NDArray[np.complex128]]

TRACE_TOLERANCE = 1e-12
EXCEPTIONAL_THRESHOLD = 1e-9
ATANH_CUT_TOLERANCE = 1e-9
RESIDUE_TOLERANCE = 1e-8

IDENTITY = np.eye(2, dtype=np.complex128)


def as_mat2(entries) -> Mat2:
    matrix = np.asarray(entries, dtype=np.complex128)
    if matrix.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("matrix entries must be finite")
    return matrix


def as_vec2(components) -> Vec2:
    vector = np.asarray(components, dtype=np.complex128)
    if vector.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {vector.shape}")
    return vector


def mat_vec(m: Mat2, v: Vec2) -> Vec2:
    return as_mat2(m) @ as_vec2(v)


def _unbox(value: np.ndarray) -> ComplexLike:
    return complex(value) if value.ndim == 0 else value


def principal_sqrt(z: ComplexLike) -> ComplexLike:
    """Principal square root.

    The result has a non-negative real part. On the negative real axis the
    root with non-negative imaginary part is returned regardless of the sign
    of the zero imaginary part.
    """
    root = np.sqrt(np.asarray(z, dtype=np.complex128))
    flip = (root.real == 0.0) & (root.imag < 0.0)
    return _unbox(np.where(flip, -root, root))


def principal_atanh(
    z: ComplexLike, *, cut_tolerance: float = ATANH_CUT_TOLERANCE
) -> ComplexLike:
    """Principal inverse hyperbolic tangent.

    Arguments within ``cut_tolerance`` of the branch cut (real, |z| > 1) are
    evaluated on the lower lip, so that the imaginary part is -pi/2.
    """
    z = np.asarray(z, dtype=np.complex128)
    on_cut = (np.abs(z.imag) <= cut_tolerance) & (np.abs(z.real) > 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        regular = np.arctanh(z)
        x = z.real
        lower_lip = 0.5 * np.log(np.abs((1.0 + x) / (1.0 - x))) - 0.5j * np.pi
    return _unbox(np.where(on_cut, lower_lip, regular))


def sin_over(eps: ComplexLike, t, *, threshold: float = 0.0) -> ComplexLike:
    """sin(eps t) / eps with the analytic limit for small eps."""
    eps = np.asarray(eps, dtype=np.complex128)
    t = np.asarray(t, dtype=np.float64)
    small = np.abs(eps) <= threshold
    safe = np.where(small, 1.0, eps)
    series = t * (1.0 - (eps * t) ** 2 / 6.0)
    return _unbox(np.where(small, series, np.sin(eps * t) / safe))


def traceless_exp(
    h: Mat2,
    t: float,
    *,
    tolerance: float = TRACE_TOLERANCE,
    threshold: float = EXCEPTIONAL_THRESHOLD,
) -> Mat2:
    """exp(-i h t) = cos(eps t) I - i sin(eps t)/eps h, eps^2 = -det h."""
    h = as_mat2(h)
    trace = h[0, 0] + h[1, 1]
    if abs(trace) > tolerance:
        raise NonTracelessError(
            f"Hamiltonian trace {trace:.3e} exceeds tolerance {tolerance:.0e}"
        )

    eps = principal_sqrt(h[0, 1] * h[1, 0] - h[0, 0] * h[1, 1])
    scale = float(np.linalg.norm(h))
    cos = np.cos(eps * t)
    if abs(eps) <= threshold * scale:
        cos = 1.0 - (eps * t) ** 2 / 2.0
    sin = sin_over(eps, t, threshold=threshold * scale)
    return cos * IDENTITY - 1j * sin * h


def checked_real(
    value: ComplexLike,
    *,
    tolerance: float = RESIDUE_TOLERANCE,
    label: str = "value",
    error: type = ComplexResidueError,
):
    """Drop the imaginary part after asserting it is below ``tolerance``."""
    value = np.asarray(value, dtype=np.complex128)
    residue = float(np.max(np.abs(value.imag))) if value.size else 0.0
    if residue > tolerance:
        raise error(
            f"{label} has imaginary residue {residue:.3e} above {tolerance:.0e}"
        )
    real = value.real
    return float(real) if real.ndim == 0 else real
