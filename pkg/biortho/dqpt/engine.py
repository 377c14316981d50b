# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
System-level observables of a quench of the non-Hermitian SSH chain

The engine sweeps the momentum grid in fixed-size blocks on a worker pool
and folds the blocks back in ascending k. Block boundaries do not depend on
the number of workers, so results are bitwise reproducible. The last sweep
is cached; an engine may be shared between threads.

Where eps_k^2 crosses the negative real axis the principal branch of eps_k
changes sign and the two prequench bands swap labels. These band flips sit
at k = 0 for |gamma| > 4 and at k = pi for |eta| < |gamma| / 4. The lower
band is smooth between flips only, so k-integrals and Fisher root brackets
never straddle a flip.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect, brentq
from scipy.signal import find_peaks

from .biortho import MINUS, biorthogonal_frames
from .dynamics import (
    ATANH_SINGULAR_TOLERANCE,
    ModeQuench,
    critical_time_array,
    critical_times,
    dynamical_phase_series,
    echo_series,
    g_k,
    lower_band_coefficients,
    self_normal_series,
    transition_series,
)
from .errors import (
    AtanhSingularError,
    BiorthoDqptError,
    GridTooCoarseError,
    ValidationError,
)
from .models.quench import (
    DirectionReport,
    DtopJump,
    DtopSeries,
    FisherBranch,
    FisherCrossing,
    QuenchPair,
    QuenchProfile,
    QuenchSpec,
    RateSeries,
    TableReport,
    TableRowReport,
)
from .models.ssh import MIN_K_SAMPLES, SshParams, block_hamiltonians, d_vector

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 128
DEFAULT_BRANCHES = range(0, 7)
DEFAULT_K_SAMPLES = 2000

CUSP_FACTOR = 5.0
CUSP_FLOOR = 1e-9
CUSP_SEPARATION = 3

RESOLVED_ECHO = 1e-2
MAX_K_STEP = np.pi / 2
NU_RESIDUE = 0.05

ROOT_TOLERANCE = 1e-10
BOUNDARY_ROOT_TOLERANCE = 1e-6
BOUNDARY_OFFSET = 1e-9
ZERO_ECHO = 1e-6

_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True, eq=False)
class _QuenchFrames:
    ks: np.ndarray
    h_f: np.ndarray
    eps_i: np.ndarray
    eps_f: np.ndarray
    right_i: np.ndarray
    kernel: np.ndarray

    @classmethod
    def build(
        cls, pre: SshParams, post: SshParams, ks: np.ndarray
    ) -> "_QuenchFrames":
        h_i = block_hamiltonians(pre, ks)
        h_f = block_hamiltonians(post, ks)
        eps_i, right_i, left_i = biorthogonal_frames(h_i, momenta=ks)
        eps_f, _, _ = biorthogonal_frames(h_f, momenta=ks)
        kernel = np.einsum(
            "...ji,...jl,...lm->...im", np.conj(left_i), h_f, right_i
        )
        return cls(
            ks=ks,
            h_f=h_f,
            eps_i=eps_i,
            eps_f=eps_f,
            right_i=right_i,
            kernel=kernel,
        )

    def overlap(self) -> np.ndarray:
        return self.kernel[:, MINUS, MINUS] / self.eps_f


@dataclass(frozen=True, eq=False)
class _Sweep:
    times: np.ndarray
    ks: np.ndarray
    echo: np.ndarray
    self_normal: np.ndarray
    geometric: np.ndarray
    pre_flips: np.ndarray


def branch_flips(eps: np.ndarray) -> np.ndarray:
    """True at j where the principal eps changes sign between k_j and
    k_{j+1} (cyclic)."""
    following = np.roll(eps, -1)
    return np.abs(following + eps) < np.abs(following - eps)


def detect_cusps(
    times: np.ndarray,
    rate: np.ndarray,
    *,
    factor: float = CUSP_FACTOR,
    floor: float = CUSP_FLOOR,
) -> Tuple[float, ...]:
    """Times where the second difference of ``rate`` spikes above ``factor``
    times its median."""
    if rate.size < 3:
        return ()

    curvature = np.abs(np.diff(rate, 2))
    threshold = max(factor * float(np.median(curvature)), floor)
    peaks, _ = find_peaks(
        curvature,
        height=threshold,
        prominence=threshold,
        distance=CUSP_SEPARATION,
    )
    return tuple(float(times[peak + 1]) for peak in peaks)


def _wrap(phase: np.ndarray) -> np.ndarray:
    return (phase + np.pi) % (2.0 * np.pi) - np.pi


def _mode(pre: SshParams, post: SshParams, k: float) -> ModeQuench:
    ks = np.array([k], dtype=np.float64)
    return ModeQuench.from_hamiltonians(
        block_hamiltonians(pre, ks)[0], block_hamiltonians(post, ks)[0]
    )


def _mode_time(spec: QuenchSpec, k: float, n: int) -> complex:
    try:
        return critical_times(_mode(spec.pre, spec.post, k), (n,))[0]
    except AtanhSingularError:
        return complex(np.nan, np.nan)


def flip_point(pre: SshParams, lower: float, upper: float) -> float:
    """Momentum in [lower, upper] where eps_k^2 meets the negative real axis.

    Endpoints are evaluated modulo 2 pi so that the wrap-around bracket ends
    on k = 0 itself. Without a sign change the endpoint closer to the axis
    is returned.
    """

    def imaginary_square(k: float) -> float:
        x, y = d_vector(pre, k % (2.0 * np.pi))
        return (x * x + y * y).imag

    f_lower, f_upper = imaginary_square(lower), imaginary_square(upper)
    if f_lower == 0.0:
        return lower
    if f_upper == 0.0:
        return upper
    if np.sign(f_lower) == np.sign(f_upper):
        return lower if abs(f_lower) <= abs(f_upper) else upper
    return brentq(imaginary_square, lower, upper, xtol=1e-15)


class DqptEngine:
    def __init__(
        self,
        *,
        workers: int = 1,
        block_size: int = DEFAULT_BLOCK_SIZE,
        cusp_factor: float = CUSP_FACTOR,
    ) -> None:
        if block_size < 1:
            raise ValidationError(f"block size must be >= 1, got {block_size}")
        self._workers = max(1, int(workers))
        self._block_size = block_size
        self._cusp_factor = cusp_factor
        self._cached: Optional[Tuple[QuenchSpec, _Sweep]] = None
        self._cache_lock = threading.Lock()

    @property
    def workers(self) -> int:
        return self._workers

    def _map_blocks(
        self, function: Callable[[slice], np.ndarray], size: int
    ) -> np.ndarray:
        blocks = [
            slice(start, min(start + self._block_size, size))
            for start in range(0, size, self._block_size)
        ]
        if self._workers == 1 or len(blocks) == 1:
            results = [function(block) for block in blocks]
        else:
            with ThreadPoolExecutor(max_workers=self._workers) as executor:
                results = list(executor.map(function, blocks))
        return np.concatenate(results, axis=0)

    def _sweep(self, spec: QuenchSpec) -> _Sweep:
        with self._cache_lock:
            cached = self._cached
            if cached is not None and cached[0] == spec:
                return cached[1]

            sweep = self._compute_sweep(spec)
            self._cached = (spec, sweep)
            return sweep

    def _compute_sweep(self, spec: QuenchSpec) -> _Sweep:
        ks = spec.k_grid()
        times = spec.t_grid()
        frames = _QuenchFrames.build(spec.pre, spec.post, ks)
        logger.info(
            "Sweeping %d modes over %d times on %d workers (%s -> %s)",
            ks.size,
            times.size,
            self._workers,
            spec.pre,
            spec.post,
        )

        def evaluate(block: slice) -> np.ndarray:
            kernel = frames.kernel[block]
            eps_f = frames.eps_f[block]
            coefficients = lower_band_coefficients(kernel, eps_f, times)
            dynamical = dynamical_phase_series(
                kernel, eps_f, times, spec.quad_steps
            )
            self_normal = self_normal_series(
                frames.h_f[block],
                frames.right_i[block][..., MINUS],
                eps_f,
                times,
            )
            logger.debug("Evaluated modes %d to %d", block.start, block.stop)
            return np.stack(
                (
                    echo_series(coefficients),
                    self_normal,
                    _wrap(np.angle(coefficients[..., MINUS]) - dynamical),
                ),
                axis=1,
            )

        stacked = self._map_blocks(evaluate, ks.size)
        return _Sweep(
            times=times,
            ks=ks,
            echo=stacked[:, 0],
            self_normal=stacked[:, 1],
            geometric=stacked[:, 2],
            pre_flips=branch_flips(frames.eps_i),
        )

    def _rate_series(
        self, times: np.ndarray, echo: np.ndarray, n_cells: int
    ) -> RateSeries:
        log_echo = np.log(np.maximum(echo, _TINY))
        rate = -np.add.reduce(log_echo, axis=0) / n_cells
        cusps = detect_cusps(times, rate, factor=self._cusp_factor)
        logger.info("Detected %d cusps", len(cusps))
        return RateSeries(times=times, rate=rate, cusps=cusps)

    def loschmidt_rate(self, spec: QuenchSpec) -> RateSeries:
        sweep = self._sweep(spec)
        return self._rate_series(sweep.times, sweep.echo, spec.n_cells)

    def self_normal_rate(self, spec: QuenchSpec) -> RateSeries:
        sweep = self._sweep(spec)
        return self._rate_series(sweep.times, sweep.self_normal, spec.n_cells)

    def dtop(self, spec: QuenchSpec) -> DtopSeries:
        sweep = self._sweep(spec)
        steps = _wrap(np.roll(sweep.geometric, -1, axis=0) - sweep.geometric)
        steps[sweep.pre_flips] = 0.0

        resolved = (
            np.minimum(sweep.echo, np.roll(sweep.echo, -1, axis=0))
            >= RESOLVED_ECHO
        )
        coarse = (np.abs(steps) >= MAX_K_STEP) & resolved
        if np.any(coarse):
            j, i = np.argwhere(coarse)[0]
            raise GridTooCoarseError(
                f"geometric phase step {steps[j, i]:.3f} between "
                f"k = {sweep.ks[j]:.6g} and the next mode at "
                f"t = {sweep.times[i]:.6g}, increase cells"
            )

        nu = np.add.reduce(steps, axis=0) / (2.0 * np.pi)
        plateau = np.round(2.0 * nu) / 2.0
        quantized = np.abs(nu - plateau) <= NU_RESIDUE

        # nu is undefined while some mode sits at a zero of its echo
        lowest = np.min(sweep.echo, axis=0)
        resolved_times = lowest >= RESOLVED_ECHO
        unexplained = ~quantized & resolved_times
        if np.any(unexplained):
            i = int(np.flatnonzero(unexplained)[0])
            raise GridTooCoarseError(
                f"DTOP {nu[i]:.4f} at t = {sweep.times[i]:.6g} is not a "
                "multiple of 1/2, increase cells"
            )

        jumps = []
        settled = np.flatnonzero(quantized & resolved_times)
        for before, after in zip(settled, settled[1:]):
            delta = plateau[after] - plateau[before]
            if delta == 0.0:
                continue
            at = after
            if after - before > 1:
                at = before + 1 + int(np.argmin(lowest[before + 1 : after]))
            jumps.append(
                DtopJump(
                    time=float(sweep.times[at]),
                    delta=Fraction(int(round(2.0 * delta)), 2),
                )
            )
        logger.info(
            "DTOP jumps: %s",
            ", ".join(f"{j.delta} at t={j.time:.4f}" for j in jumps) or "none",
        )
        return DtopSeries(times=sweep.times, nu=nu, jumps=tuple(jumps))

    def pk_heatmap(self, spec: QuenchSpec) -> np.ndarray:
        """Transition probability p(k, t) with shape (cells, t-steps)."""
        ks = spec.k_grid()
        times = spec.t_grid()
        frames = _QuenchFrames.build(spec.pre, spec.post, ks)

        def evaluate(block: slice) -> np.ndarray:
            return transition_series(
                lower_band_coefficients(
                    frames.kernel[block], frames.eps_f[block], times
                )
            )

        return self._map_blocks(evaluate, ks.size)

    def _refine(
        self, spec: QuenchSpec, n: int, lower: float, upper: float
    ) -> Optional[FisherCrossing]:
        def imaginary(k: float) -> float:
            return _mode_time(spec, k, n).imag

        try:
            k_c = bisect(imaginary, lower, upper, xtol=1e-15, maxiter=200)
        except ValueError:
            return None

        t_c = _mode_time(spec, k_c, n)
        if not abs(t_c.imag) < ROOT_TOLERANCE or t_c.real <= 0.0:
            return None
        return self._verified(spec, k_c, k_c, t_c.real)

    def _verified(
        self, spec: QuenchSpec, k_eval: float, k_c: float, t_c: float
    ) -> Optional[FisherCrossing]:
        residual = g_k(_mode(spec.pre, spec.post, k_eval), t_c)
        if residual >= ZERO_ECHO:
            return None
        return FisherCrossing(k=float(k_c), t=float(t_c), residual=residual)

    def _boundary_crossings(
        self, spec: QuenchSpec, n: int, flip_points: Sequence[float]
    ) -> List[FisherCrossing]:
        crossings = []
        for k_star in flip_points:
            for k_side in (k_star - BOUNDARY_OFFSET, k_star + BOUNDARY_OFFSET):
                t_side = _mode_time(spec, k_side, n)
                if (
                    abs(t_side.imag) < BOUNDARY_ROOT_TOLERANCE
                    and t_side.real > 0.0
                ):
                    crossing = self._verified(
                        spec, k_side, k_star % (2.0 * np.pi), t_side.real
                    )
                    if crossing:
                        crossings.append(crossing)
        return crossings

    def fisher_branches(
        self,
        spec: QuenchSpec,
        n_range: Iterable[int] = DEFAULT_BRANCHES,
        k_samples: int = DEFAULT_K_SAMPLES,
    ) -> List[FisherBranch]:
        if k_samples < MIN_K_SAMPLES:
            raise ValidationError(
                f"k-samples must be >= {MIN_K_SAMPLES}, got {k_samples}"
            )

        step = 2.0 * np.pi / k_samples
        ks = step * np.arange(k_samples)
        frames = _QuenchFrames.build(spec.pre, spec.post, ks)
        m = frames.overlap()
        singular = (np.abs(m - 1.0) < ATANH_SINGULAR_TOLERANCE) | (
            np.abs(m + 1.0) < ATANH_SINGULAR_TOLERANCE
        )
        pre_flips = branch_flips(frames.eps_i)
        smooth = ~(
            pre_flips
            | branch_flips(frames.eps_f)
            | singular
            | np.roll(singular, -1)
        )
        flip_points = [
            flip_point(
                spec.pre,
                ks[j],
                2.0 * np.pi if j == k_samples - 1 else ks[j + 1],
            )
            for j in np.flatnonzero(pre_flips)
        ]
        if singular.any():
            logger.debug("Skipping %d singular modes", int(singular.sum()))

        branches = []
        for n in n_range:
            t_n = np.full(k_samples, complex(np.nan, np.nan))
            regular = ~singular
            t_n[regular] = critical_time_array(
                frames.eps_f[regular], m[regular], n
            )
            negative = t_n.imag < 0.0
            brackets = np.flatnonzero(
                smooth & (negative != np.roll(negative, -1))
            )

            crossings = []
            rejected = 0
            for j in brackets:
                crossing = self._refine(spec, n, ks[j], ks[j] + step)
                if crossing is None:
                    rejected += 1
                else:
                    crossings.append(crossing)
            crossings.extend(self._boundary_crossings(spec, n, flip_points))
            crossings.sort(key=lambda crossing: crossing.k)

            logger.debug(
                "Branch n=%d: %d crossings, %d rejected candidates",
                n,
                len(crossings),
                rejected,
            )
            branches.append(
                FisherBranch(
                    n=n,
                    k_values=ks,
                    z_values=1j * t_n,
                    crossings=tuple(crossings),
                    skipped=int(singular.sum()),
                )
            )
        return branches

    def quench_profile(
        self,
        spec: QuenchSpec,
        n_range: Iterable[int] = DEFAULT_BRANCHES,
        k_samples: Optional[int] = None,
    ) -> QuenchProfile:
        branches = self.fisher_branches(
            spec, n_range, k_samples or max(spec.n_cells, MIN_K_SAMPLES)
        )
        return QuenchProfile(
            crossing_counts=frozenset(b.crossing_count for b in branches),
            jump_sizes=self.dtop(spec).jump_sizes(),
        )

    def _direction(
        self,
        spec: QuenchSpec,
        expected: Optional[QuenchProfile],
        n_range: Iterable[int],
        k_samples: Optional[int],
    ) -> DirectionReport:
        try:
            computed = self.quench_profile(spec, n_range, k_samples)
        except (BiorthoDqptError, ArithmeticError, ValueError) as e:
            logger.error("Quench %s -> %s failed: %s", spec.pre, spec.post, e)
            return DirectionReport(
                pre=spec.pre,
                post=spec.post,
                expected=expected,
                computed=None,
                error=str(e) or type(e).__name__,
            )
        return DirectionReport(
            pre=spec.pre, post=spec.post, expected=expected, computed=computed
        )

    def table_s1_report(
        self,
        rows: Iterable[QuenchPair],
        *,
        template: Optional[QuenchSpec] = None,
        n_range: Iterable[int] = DEFAULT_BRANCHES,
        k_samples: Optional[int] = None,
    ) -> TableReport:
        """Profiles of both quench directions of every row.

        ``template`` supplies the resolution; its parameters are replaced by
        each row's.
        """
        n_range = tuple(n_range)
        reports = []
        for row in rows:
            base = template or QuenchSpec(pre=row.first, post=row.second)
            forward = replace(base, pre=row.first, post=row.second)
            report = TableRowReport(
                label=row.label,
                forward=self._direction(
                    forward, row.forward, n_range, k_samples
                ),
                reverse=self._direction(
                    forward.reversed(), row.reverse, n_range, k_samples
                ),
            )
            logger.info(
                "%s: forward %s, reverse %s, %s",
                row.label,
                report.forward.computed,
                report.reverse.computed,
                "PASS" if report.passed else "FAIL",
            )
            reports.append(report)
        return TableReport(rows=tuple(reports))

