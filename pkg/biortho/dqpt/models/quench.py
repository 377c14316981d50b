# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""Quench specifications and the result series computed from them"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, Optional, Tuple

import numpy as np

from ..errors import ValidationError
from .ssh import SshParams

DEFAULT_CELLS = 2000
DEFAULT_T_MAX = 5.0
DEFAULT_T_STEPS = 2000
DEFAULT_QUAD_STEPS = 512


@dataclass(frozen=True)
class QuenchSpec:
    pre: SshParams
    post: SshParams
    n_cells: int = DEFAULT_CELLS
    t_max: float = DEFAULT_T_MAX
    t_steps: int = DEFAULT_T_STEPS
    quad_steps: int = DEFAULT_QUAD_STEPS

    def __post_init__(self) -> None:
        if self.n_cells < 2:
            raise ValidationError(f"cells must be >= 2, got {self.n_cells}")
        if not (np.isfinite(self.t_max) and self.t_max > 0.0):
            raise ValidationError(f"t-max must be > 0, got {self.t_max}")
        if self.t_steps < 2:
            raise ValidationError(f"t-steps must be >= 2, got {self.t_steps}")
        if self.quad_steps < 2:
            raise ValidationError(
                f"quad-steps must be >= 2, got {self.quad_steps}"
            )

    @property
    def is_trivial(self) -> bool:
        return self.pre == self.post

    def k_grid(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_cells) / self.n_cells

    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.t_steps)

    def reversed(self) -> "QuenchSpec":
        return replace(self, pre=self.post, post=self.pre)

    def serialize(self) -> Dict[str, Any]:
        return {
            "pre": {"eta": self.pre.eta, "gamma": self.pre.gamma},
            "post": {"eta": self.post.eta, "gamma": self.post.gamma},
            "n_cells": self.n_cells,
            "t_max": self.t_max,
            "t_steps": self.t_steps,
            "quad_steps": self.quad_steps,
        }

    @classmethod
    def deserialize(cls, data: Dict[str, Any]) -> "QuenchSpec":
        return cls(
            pre=SshParams(**data["pre"]),
            post=SshParams(**data["post"]),
            n_cells=data["n_cells"],
            t_max=data["t_max"],
            t_steps=data["t_steps"],
            quad_steps=data["quad_steps"],
        )


@dataclass(frozen=True, eq=False)
class RateSeries:
    times: np.ndarray
    rate: np.ndarray
    cusps: Tuple[float, ...]


@dataclass(frozen=True)
class DtopJump:
    time: float
    delta: Fraction


@dataclass(frozen=True, eq=False)
class DtopSeries:
    times: np.ndarray
    nu: np.ndarray
    jumps: Tuple[DtopJump, ...]

    def jump_sizes(self) -> FrozenSet[Fraction]:
        return frozenset(abs(jump.delta) for jump in self.jumps)


@dataclass(frozen=True)
class FisherCrossing:
    k: float
    t: float
    residual: float


@dataclass(frozen=True, eq=False)
class FisherBranch:
    n: int
    k_values: np.ndarray
    z_values: np.ndarray
    crossings: Tuple[FisherCrossing, ...]
    skipped: int = 0

    @property
    def crossing_count(self) -> int:
        return len(self.crossings)


def format_fraction_set(values: Iterable[Any]) -> str:
    return ",".join(str(value) for value in sorted(values)) or "-"


@dataclass(frozen=True)
class QuenchProfile:
    """Per-branch crossing counts and DTOP jump magnitudes of one quench"""

    crossing_counts: FrozenSet[int]
    jump_sizes: FrozenSet[Fraction]

    def __str__(self) -> str:
        return (
            f"{format_fraction_set(self.crossing_counts)}/"
            f"{format_fraction_set(self.jump_sizes)}"
        )


@dataclass(frozen=True)
class QuenchPair:
    """Two parameter points quenched in both directions"""

    label: str
    first: SshParams
    second: SshParams
    forward: Optional[QuenchProfile] = None
    reverse: Optional[QuenchProfile] = None


@dataclass(frozen=True)
class DirectionReport:
    pre: SshParams
    post: SshParams
    expected: Optional[QuenchProfile]
    computed: Optional[QuenchProfile]
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return (
            self.error is None
            and self.expected is not None
            and self.computed == self.expected
        )


@dataclass(frozen=True)
class TableRowReport:
    label: str
    forward: DirectionReport
    reverse: DirectionReport

    @property
    def passed(self) -> bool:
        return self.forward.passed and self.reverse.passed


@dataclass(frozen=True)
class TableReport:
    rows: Tuple[TableRowReport, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def failing(self) -> Tuple[TableRowReport, ...]:
        return tuple(row for row in self.rows if not row.passed)
