# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Quench dynamics of a single momentum mode

The prequench lower band ``u_-`` is evolved with the postquench block. In the
prequench basis the evolved state has coefficients

    c(t) = cos(eps_f t) e_- - i sin(eps_f t) / eps_f F e_-

where ``F[n, m] = <w_n|H_f|u_m>`` is the postquench Hamiltonian in the
prequench biorthogonal frame. The per-mode functions are the reference
semantics; the ``*_series`` functions evaluate whole blocks of modes on
whole time grids and are what the engine runs.
"""

import logging
from dataclasses import dataclass
from math import ceil
from typing import Iterable, List, Tuple

import numpy as np
from scipy.integrate import simpson

from .biortho import (
    MINUS,
    PLUS,
    BiorthoBasis,
    associated_state,
    decompose,
    eig_biortho,
)
from .complexla import (
    EXCEPTIONAL_THRESHOLD,
    RESIDUE_TOLERANCE,
    ComplexScalar,
    Mat2,
    Vec2,
    as_mat2,
    checked_real,
    principal_atanh,
    sin_over,
    traceless_exp,
)
from .errors import (
    AtanhSingularError,
    PhaseStepTooLargeError,
    QuadratureResidueError,
    ValidationError,
    ZeroNormError,
)

logger = logging.getLogger(__name__)

ATANH_SINGULAR_TOLERANCE = 1e-12
QUADRATURE_TOLERANCE = 1e-6
PHASE_STEP_LIMIT = np.pi / 2
DEFAULT_QUAD_STEPS = 512


@dataclass(frozen=True, eq=False)
class ModeQuench:
    h_i: Mat2
    h_f: Mat2
    basis_i: BiorthoBasis
    basis_f: BiorthoBasis
    eps_f: ComplexScalar

    @classmethod
    def from_hamiltonians(cls, h_i: Mat2, h_f: Mat2) -> "ModeQuench":
        basis_f = eig_biortho(h_f)
        return cls(
            h_i=as_mat2(h_i),
            h_f=as_mat2(h_f),
            basis_i=eig_biortho(h_i),
            basis_f=basis_f,
            eps_f=basis_f.e_plus,
        )

    def kernel_matrix(self) -> np.ndarray:
        """F[n, m] = <w_n|H_f|u_m> in the prequench frame."""
        return np.conj(self.basis_i.left).T @ self.h_f @ self.basis_i.right


@dataclass(frozen=True)
class OverlapKernel:
    m: ComplexScalar


def _require_time(t: float) -> None:
    if not t >= 0.0:
        raise ValidationError(f"evolution time must be >= 0, got {t}")


def overlap_kernel(mq: ModeQuench) -> OverlapKernel:
    return OverlapKernel(m=complex(mq.kernel_matrix()[MINUS, MINUS] / mq.eps_f))


def evolve_lower(mq: ModeQuench, t: float) -> Vec2:
    _require_time(t)
    return traceless_exp(mq.h_f, t) @ mq.basis_i.u_minus


def amplitude(mq: ModeQuench, t: float) -> ComplexScalar:
    """<w_-|u_-(t)> = cos(eps_f t) - i sin(eps_f t) m"""
    _require_time(t)
    m = overlap_kernel(mq).m
    return complex(np.cos(mq.eps_f * t) - 1j * np.sin(mq.eps_f * t) * m)


def g_k(mq: ModeQuench, t: float) -> float:
    state = evolve_lower(mq, t)
    norm = np.vdot(associated_state(state, mq.basis_i), state)
    denominator = checked_real(
        norm, tolerance=RESIDUE_TOLERANCE, label="echo denominator"
    )
    return abs(amplitude(mq, t)) ** 2 / denominator


def rewritten_echo(mq: ModeQuench, t: float) -> float:
    """<u~|u(t)><u~(t)|u>/<u~(t)|u(t)> as an independent route to g_k."""
    initial = mq.basis_i.u_minus
    state = evolve_lower(mq, t)
    evolved_left = associated_state(state, mq.basis_i)
    value = (
        np.vdot(mq.basis_i.w_minus, state)
        * np.vdot(evolved_left, initial)
        / np.vdot(evolved_left, state)
    )
    return checked_real(value, label="rewritten echo")


def self_normal_echo(mq: ModeQuench, t: float) -> float:
    initial = mq.basis_i.u_minus
    state = evolve_lower(mq, t)
    overlap = np.vdot(initial, state)
    return float(
        abs(overlap) ** 2
        / (np.vdot(initial, initial).real * np.vdot(state, state).real)
    )


def critical_time_array(eps_f, m, n) -> np.ndarray:
    """t_n = pi (2n + 1) / (2 eps_f) - i atanh(m) / eps_f, broadcast."""
    eps_f = np.asarray(eps_f, dtype=np.complex128)
    n = np.asarray(n, dtype=np.float64)
    return np.pi * (2.0 * n + 1.0) / (2.0 * eps_f) - 1j * np.asarray(
        principal_atanh(m)
    ) / eps_f


def critical_times(mq: ModeQuench, n_range: Iterable[int]) -> List[complex]:
    m = overlap_kernel(mq).m
    if (
        abs(m - 1.0) < ATANH_SINGULAR_TOLERANCE
        or abs(m + 1.0) < ATANH_SINGULAR_TOLERANCE
    ):
        raise AtanhSingularError(f"overlap kernel m = {m:.6g} has no zero")
    branches = np.array(list(n_range), dtype=np.int64)
    return [complex(t) for t in critical_time_array(mq.eps_f, m, branches)]


def lower_band_coefficients(kernel, eps_f, times) -> np.ndarray:
    """Coefficients of the evolved lower band in the prequench frame.

    ``kernel`` has shape ``(..., 2, 2)``, ``eps_f`` shape ``(...)`` and
    ``times`` shape ``(T,)``. The result has shape ``(..., T, 2)``.
    """
    kernel = np.asarray(kernel, dtype=np.complex128)
    eps = np.asarray(eps_f, dtype=np.complex128)[..., np.newaxis]
    times = np.asarray(times, dtype=np.float64)
    cos = np.cos(eps * times)
    sin = np.asarray(
        sin_over(eps, times, threshold=EXCEPTIONAL_THRESHOLD * np.abs(eps))
    )
    column = kernel[..., :, MINUS]
    coefficients = -1j * sin[..., np.newaxis] * column[..., np.newaxis, :]
    coefficients[..., MINUS] += cos
    return coefficients


def echo_series(coefficients: np.ndarray) -> np.ndarray:
    weights = np.abs(coefficients) ** 2
    return weights[..., MINUS] / weights.sum(axis=-1)


def transition_series(coefficients: np.ndarray) -> np.ndarray:
    weights = np.abs(coefficients) ** 2
    return weights[..., PLUS] / weights.sum(axis=-1)


def phase_integrand(
    kernel: np.ndarray, coefficients: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """<u~(s)|H_f|u(s)> / <u~(s)|u(s)> and the norm <u~(s)|u(s)>."""
    applied = np.einsum("...ij,...tj->...ti", kernel, coefficients)
    numerator = np.sum(np.conj(coefficients) * applied, axis=-1)
    norm = np.sum(np.abs(coefficients) ** 2, axis=-1)
    if np.any(norm < 1e-300):
        raise ZeroNormError("evolved state lost its biorthogonal norm")
    return numerator / norm, norm


def _even(panels: int) -> int:
    return panels + panels % 2


def dynamical_phase(mq: ModeQuench, t: float, quad_steps: int) -> float:
    """Biorthogonal dynamical phase by composite Simpson on ``quad_steps``
    panels (rounded up to even)."""
    _require_time(t)
    if quad_steps < 2:
        raise ValidationError(f"quad_steps must be >= 2, got {quad_steps}")
    if t == 0.0:
        return 0.0

    kernel = mq.kernel_matrix()
    grid = np.linspace(0.0, t, _even(quad_steps) + 1)
    ratio, norm = phase_integrand(
        kernel, lower_band_coefficients(kernel, mq.eps_f, grid)
    )
    value = -simpson(ratio, x=grid) + 0.5j * np.log(norm[-1])
    return checked_real(
        value,
        tolerance=QUADRATURE_TOLERANCE,
        label=f"dynamical phase at t = {t:.6g}",
        error=QuadratureResidueError,
    )


def _refinement(times: np.ndarray, quad_steps: int) -> int:
    dt = float(times[1] - times[0])
    return _even(max(2, ceil(dt * quad_steps)))


def dynamical_phase_series(
    kernel, eps_f, times, quad_steps: int = DEFAULT_QUAD_STEPS
) -> np.ndarray:
    """Dynamical phase on a uniform time grid starting at 0.

    Every coarse interval is split into an even number of Simpson panels, at
    least ``quad_steps`` per unit time, and the pieces are accumulated.
    Returns shape ``(..., T)``.
    """
    times = np.asarray(times, dtype=np.float64)
    if times.size < 2:
        return np.zeros(np.shape(eps_f) + times.shape)

    refine = _refinement(times, quad_steps)
    fine = np.linspace(times[0], times[-1], (times.size - 1) * refine + 1)
    ratio, norm = phase_integrand(
        kernel, lower_band_coefficients(kernel, eps_f, fine)
    )

    windows = refine * np.arange(times.size - 1)[:, np.newaxis] + np.arange(
        refine + 1
    )
    pieces = simpson(ratio[..., windows], dx=fine[1] - fine[0], axis=-1)
    integral = np.concatenate(
        (np.zeros(pieces.shape[:-1] + (1,)), np.cumsum(pieces, axis=-1)),
        axis=-1,
    )
    value = -integral + 0.5j * np.log(norm[..., ::refine])
    return checked_real(
        value,
        tolerance=QUADRATURE_TOLERANCE,
        label="dynamical phase series",
        error=QuadratureResidueError,
    )


def self_normal_series(h_f, initial, eps_f, times) -> np.ndarray:
    """|<u(0)|u(t)>|^2 / (<u(0)|u(0)> <u(t)|u(t)>) for a block of modes.

    ``h_f`` has shape ``(..., 2, 2)``, ``initial`` shape ``(..., 2)``.
    """
    h_f = np.asarray(h_f, dtype=np.complex128)
    initial = np.asarray(initial, dtype=np.complex128)
    eps = np.asarray(eps_f, dtype=np.complex128)[..., np.newaxis]
    times = np.asarray(times, dtype=np.float64)
    cos = np.cos(eps * times)
    sin = np.asarray(
        sin_over(eps, times, threshold=EXCEPTIONAL_THRESHOLD * np.abs(eps))
    )
    applied = np.einsum("...ij,...j->...i", h_f, initial)
    states = (
        cos[..., np.newaxis] * initial[..., np.newaxis, :]
        - 1j * sin[..., np.newaxis] * applied[..., np.newaxis, :]
    )
    overlap = np.sum(np.conj(initial)[..., np.newaxis, :] * states, axis=-1)
    initial_norm = np.sum(np.abs(initial) ** 2, axis=-1)[..., np.newaxis]
    state_norm = np.sum(np.abs(states) ** 2, axis=-1)
    return np.abs(overlap) ** 2 / (initial_norm * state_norm)


def geometric_phase(mq: ModeQuench, t: float, quad_steps: int) -> float:
    """arg <w_-|u_-(t)> tracked continuously from 0, minus the dynamical
    phase."""
    _require_time(t)
    if quad_steps < 2:
        raise ValidationError(f"quad_steps must be >= 2, got {quad_steps}")
    if t == 0.0:
        return 0.0

    grid = np.linspace(0.0, t, _even(quad_steps) + 1)
    m = overlap_kernel(mq).m
    amplitudes = np.cos(mq.eps_f * grid) - 1j * np.sin(mq.eps_f * grid) * m
    phases = np.unwrap(np.angle(amplitudes))
    steps = np.abs(np.diff(phases))
    if steps.size and steps.max() >= PHASE_STEP_LIMIT:
        worst = int(np.argmax(steps))
        raise PhaseStepTooLargeError(
            f"phase step {steps[worst]:.3f} at t = {grid[worst + 1]:.6g} "
            f"needs more than {quad_steps} steps"
        )
    return float(phases[-1] - phases[0]) - dynamical_phase(mq, t, quad_steps)


def two_level_probability(mq: ModeQuench, t: float) -> float:
    c = decompose(evolve_lower(mq, t), mq.basis_i)
    total = c.weight()
    if total == 0.0:
        raise ZeroNormError(f"evolved state vanishes at t = {t:.6g}")
    return abs(c.c_plus) ** 2 / total
