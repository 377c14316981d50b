# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Worked two-level example of associated states and biorthogonal probabilities

The state ``u_+`` of ``INITIAL_HAMILTONIAN`` is evolved for unit time with
``FINAL_HAMILTONIAN`` and compared with ``2 u_+ + 3 u_-``. The report also
carries the complex value obtained when the left state is evolved like a
ket.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np

from .biortho import (
    Decomposition,
    associated_state,
    decompose,
    eig_biortho,
    naive_left_evolution_diagnostic,
    naive_left_state,
    transition_probability,
)
from .complexla import Vec2, traceless_exp

logger = logging.getLogger(__name__)

INITIAL_HAMILTONIAN = np.array([[0, 4 + 1j], [2 - 1j, 0]], dtype=np.complex128)
FINAL_HAMILTONIAN = np.array([[0, -3j], [-2 + 3j, 0]], dtype=np.complex128)
SUPERPOSITION = (2.0, 3.0)
EVOLUTION_TIME = 1.0
TOLERANCE = 1e-3

EXPECTED: Dict[str, Any] = {
    "evolved_state": (-1.132 + 0.190j, -0.359 - 0.927j),
    "coefficients": (-0.772 - 0.359j, 0.264 - 0.953j),
    "associated_state": (-0.614 + 0.103j, -0.359 - 0.927j),
    "probability": 0.603,
    "naive_left_state": (-0.967 - 1.094j, -1.373 + 0.411j),
    "naive_probability": -0.372 + 1.118j,
}


def _pair(value: complex) -> List[float]:
    return [float(np.real(value)), float(np.imag(value))]


@dataclass(frozen=True, eq=False)
class SmExampleReport:
    evolved_state: Vec2
    coefficients: Decomposition
    associated_state: Vec2
    probability: float
    naive_left_state: Vec2
    naive_probability: complex

    def values(self) -> Dict[str, Any]:
        return {
            "evolved_state": tuple(self.evolved_state),
            "coefficients": (
                self.coefficients.c_plus,
                self.coefficients.c_minus,
            ),
            "associated_state": tuple(self.associated_state),
            "probability": self.probability,
            "naive_left_state": tuple(self.naive_left_state),
            "naive_probability": self.naive_probability,
        }

    def serialize(self) -> Dict[str, Any]:
        serialized = {}
        for name, value in self.values().items():
            if isinstance(value, tuple):
                serialized[name] = [_pair(component) for component in value]
            elif isinstance(value, complex):
                serialized[name] = _pair(value)
            else:
                serialized[name] = value
        return serialized

    def mismatches(self, tolerance: float = TOLERANCE) -> List[str]:
        """One line per field deviating from the reference values."""
        lines = []
        for name, value in self.values().items():
            computed = np.atleast_1d(np.asarray(value, dtype=np.complex128))
            expected = np.atleast_1d(
                np.asarray(EXPECTED[name], dtype=np.complex128)
            )
            deviation = float(np.max(np.abs(computed - expected)))
            if deviation > tolerance:
                lines.append(
                    f"{name}: computed {np.round(computed, 4).tolist()}, "
                    f"expected {expected.tolist()} "
                    f"(deviation {deviation:.2e})"
                )
        return lines


def run_sm_example() -> SmExampleReport:
    basis = eig_biortho(INITIAL_HAMILTONIAN)
    evolved = traceless_exp(FINAL_HAMILTONIAN, EVOLUTION_TIME) @ basis.u_plus
    target = SUPERPOSITION[0] * basis.u_plus + SUPERPOSITION[1] * basis.u_minus

    report = SmExampleReport(
        evolved_state=evolved,
        coefficients=decompose(evolved, basis),
        associated_state=associated_state(evolved, basis),
        probability=transition_probability(evolved, target, basis),
        naive_left_state=naive_left_state(
            FINAL_HAMILTONIAN, basis, EVOLUTION_TIME
        ),
        naive_probability=naive_left_evolution_diagnostic(
            FINAL_HAMILTONIAN, basis, target, EVOLUTION_TIME
        ),
    )
    logger.debug(
        "Worked example: p = %.6f, naive p = %s",
        report.probability,
        report.naive_probability,
    )
    return report
