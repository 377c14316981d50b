# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""Subcommands of the biortho-dqpt command line"""

import json
import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from .artifacts import RunDirectory
from .cli.parser import Arguments
from .engine import DqptEngine
from .errors import OnBoundaryError, ValidationError
from .example import run_sm_example
from .loader import JSONCatalogLoader
from .models.quench import (
    DirectionReport,
    QuenchPair,
    QuenchProfile,
    QuenchSpec,
    format_fraction_set,
)
from .models.ssh import SshParams, boundary_distance, classify_phase

logger = logging.getLogger(__name__)

Command = Callable[[Arguments, DqptEngine], int]


def _spec_from(args: Arguments) -> QuenchSpec:
    parameters = {
        "--eta-i": args.eta_i,
        "--gamma-i": args.gamma_i,
        "--eta-f": args.eta_f,
        "--gamma-f": args.gamma_f,
    }
    missing = [flag for flag, value in parameters.items() if value is None]
    if missing:
        raise ValidationError(
            f"missing quench parameters: {', '.join(missing)}"
        )

    try:
        return QuenchSpec(
            pre=SshParams(float(args.eta_i), float(args.gamma_i)),
            post=SshParams(float(args.eta_f), float(args.gamma_f)),
            n_cells=int(args.cells),
            t_max=float(args.t_max),
            t_steps=int(args.t_steps),
            quad_steps=int(args.quad_steps),
        )
    except ValidationError:
        raise
    except (TypeError, ValueError) as e:
        raise ValidationError(f"invalid quench settings: {e}") from e


def _branches(args: Arguments) -> range:
    try:
        n_min, n_max = int(args.n_min), int(args.n_max)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"invalid branch window: {e}") from e
    if n_min > n_max:
        raise ValidationError(
            f"--n-min {n_min} must not exceed --n-max {n_max}"
        )
    return range(n_min, n_max + 1)


def _positive(value, flag: str) -> int:
    try:
        number = int(value)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{flag} must be an integer, got {value}") from e
    if number < 1:
        raise ValidationError(f"{flag} must be positive, got {number}")
    return number


def _log_phases(spec: QuenchSpec) -> None:
    for name, params in (("prequench", spec.pre), ("postquench", spec.post)):
        label = classify_phase(params)
        logger.info("%s point %s lies in phase %s", name, params, label)


def cmd_quench(args: Arguments, engine: DqptEngine) -> int:
    spec = _spec_from(args)
    _log_phases(spec)

    rate = engine.loschmidt_rate(spec)
    self_normal = engine.self_normal_rate(spec)
    dtop = engine.dtop(spec)

    with RunDirectory(args.out) as run:
        run.write_csv(
            "rate.csv",
            ("t", "LR_biortho", "LR_selfnormal"),
            zip(rate.times, rate.rate, self_normal.rate),
        )
        run.write_csv("dtop.csv", ("t", "nu"), zip(dtop.times, dtop.nu))
        run.write_csv(
            "cusps.csv",
            ("series", "t"),
            [("biortho", t) for t in rate.cusps]
            + [("selfnormal", t) for t in self_normal.cusps],
        )
        run.write_csv(
            "dtop_jumps.csv",
            ("t", "delta"),
            ((jump.time, jump.delta) for jump in dtop.jumps),
        )
        run.finalize("quench", spec.serialize())
    return 0


def cmd_fisher(args: Arguments, engine: DqptEngine) -> int:
    spec = _spec_from(args)
    _log_phases(spec)
    n_range = _branches(args)
    k_samples = _positive(args.k_samples, "--k-samples")

    branches = engine.fisher_branches(spec, n_range, k_samples)

    with RunDirectory(args.out) as run:
        run.write_csv(
            "fisher.csv",
            ("n", "k", "re_z", "im_z"),
            (
                (branch.n, k, z.real, z.imag)
                for branch in branches
                for k, z in zip(branch.k_values, branch.z_values)
            ),
        )
        run.write_csv(
            "crossings.csv",
            ("n", "k_c", "t_c", "g_residual"),
            (
                (branch.n, crossing.k, crossing.t, crossing.residual)
                for branch in branches
                for crossing in branch.crossings
            ),
        )
        settings = spec.serialize()
        settings.update(
            n_min=n_range.start, n_max=n_range.stop - 1, k_samples=k_samples
        )
        run.finalize("fisher", settings)

    for branch in branches:
        logger.info(
            "Branch n=%d has %d crossings", branch.n, branch.crossing_count
        )
    return 0


def cmd_phase_diagram(args: Arguments, engine: DqptEngine) -> int:
    # pylint: disable=unused-argument
    (eta_low, eta_high), (gamma_low, gamma_high) = (
        args.eta_range,
        args.gamma_range,
    )
    grid = _positive(args.grid, "--grid")
    if grid < 2:
        raise ValidationError(f"--grid must be at least 2, got {grid}")
    k_samples = _positive(args.k_samples, "--k-samples")

    etas = np.linspace(eta_low, eta_high, grid)
    gammas = np.linspace(gamma_low, gamma_high, grid)
    margin = 0.5 * max(etas[1] - etas[0], gammas[1] - gammas[0])

    rows = []
    for gamma in gammas:
        for eta in etas:
            params = SshParams(float(eta), float(gamma))
            try:
                label = classify_phase(params, k_samples=k_samples)
                region, winding = label.region.value, label.winding
            except OnBoundaryError:
                region, winding = "boundary", None
            rows.append(
                (
                    eta,
                    gamma,
                    region,
                    winding,
                    bool(boundary_distance(params) < margin),
                )
            )

    with RunDirectory(args.out) as run:
        run.write_csv(
            "phases.csv",
            ("eta", "gamma", "region", "winding", "near_boundary"),
            rows,
        )
        run.finalize(
            "phase-diagram",
            {
                "eta_range": [eta_low, eta_high],
                "gamma_range": [gamma_low, gamma_high],
                "grid": grid,
                "k_samples": k_samples,
            },
        )
    return 0


def cmd_sm_example(args: Arguments, engine: DqptEngine) -> int:
    # pylint: disable=unused-argument
    report = run_sm_example()
    mismatches = report.mismatches()
    payload = report.serialize()
    payload["mismatches"] = mismatches

    print(json.dumps(payload, indent=2, sort_keys=True))
    with RunDirectory(args.out) as run:
        run.write_json("sm_example.json", payload)
        run.finalize("sm-example")

    for line in mismatches:
        logger.error("Mismatch in %s", line)
    return 1 if mismatches else 0


def _select_rows(
    pairs: List[QuenchPair], rows: Optional[str]
) -> List[QuenchPair]:
    if not rows:
        return pairs

    by_label: Dict[str, QuenchPair] = {pair.label: pair for pair in pairs}
    labels = [label.strip() for label in str(rows).split(",") if label.strip()]
    unknown = [label for label in labels if label not in by_label]
    if unknown:
        raise ValidationError(
            f"unknown table rows {', '.join(unknown)}; "
            f"known rows are {', '.join(by_label)}"
        )
    return [by_label[label] for label in labels]


def _profile_cells(profile: Optional[QuenchProfile]):
    if profile is None:
        return "", ""
    return (
        format_fraction_set(profile.crossing_counts),
        format_fraction_set(profile.jump_sizes),
    )


def _direction_row(label: str, direction: str, report: DirectionReport):
    crossings, jumps = _profile_cells(report.computed)
    expected_crossings, expected_jumps = _profile_cells(report.expected)
    return (
        label,
        direction,
        report.pre.eta,
        report.pre.gamma,
        report.post.eta,
        report.post.gamma,
        crossings,
        expected_crossings,
        jumps,
        expected_jumps,
        "PASS" if report.passed else "FAIL",
        report.error or "",
    )


def cmd_table_s1(args: Arguments, engine: DqptEngine) -> int:
    loader = (
        JSONCatalogLoader(Path(args.catalog))
        if args.catalog
        else JSONCatalogLoader()
    )
    pairs = _select_rows(loader.load_pairs(), args.rows)
    if not pairs:
        raise ValidationError("the quench catalog has no rows")

    first = pairs[0]
    try:
        template = QuenchSpec(
            pre=first.first,
            post=first.second,
            n_cells=int(args.cells),
            t_max=float(args.t_max),
            t_steps=int(args.t_steps),
            quad_steps=int(args.quad_steps),
        )
    except ValidationError:
        raise
    except (TypeError, ValueError) as e:
        raise ValidationError(f"invalid resolution settings: {e}") from e
    n_range = _branches(args)

    report = engine.table_s1_report(pairs, template=template, n_range=n_range)

    with RunDirectory(args.out) as run:
        run.write_csv(
            "table_s1.csv",
            (
                "row",
                "direction",
                "pre_eta",
                "pre_gamma",
                "post_eta",
                "post_gamma",
                "crossings",
                "expected_crossings",
                "jumps",
                "expected_jumps",
                "status",
                "error",
            ),
            [
                _direction_row(row.label, direction, getattr(row, direction))
                for row in report.rows
                for direction in ("forward", "reverse")
            ],
        )
        settings = template.serialize()
        del settings["pre"], settings["post"]
        settings.update(
            rows=[pair.label for pair in pairs],
            n_min=n_range.start,
            n_max=n_range.stop - 1,
        )
        run.finalize("table-s1", settings)

    failing = report.failing()
    if failing:
        logger.error(
            "Rows not matching the catalog: %s",
            ", ".join(row.label for row in failing),
        )
        return 1
    return 0


COMMANDS: Dict[str, Command] = {
    "quench": cmd_quench,
    "fisher": cmd_fisher,
    "phase-diagram": cmd_phase_diagram,
    "sm-example": cmd_sm_example,
    "table-s1": cmd_table_s1,
}
