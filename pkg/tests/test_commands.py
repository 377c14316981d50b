# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import csv
import json
import tempfile
import unittest
from argparse import Namespace
from contextlib import redirect_stdout
from fractions import Fraction
from io import StringIO
from pathlib import Path
from unittest.mock import MagicMock

from biortho.dqpt.commands import (
    cmd_fisher,
    cmd_phase_diagram,
    cmd_quench,
    cmd_sm_example,
    cmd_table_s1,
)
from biortho.dqpt.engine import DqptEngine
from biortho.dqpt.errors import ValidationError
from biortho.dqpt.models.quench import (
    DirectionReport,
    QuenchProfile,
    TableReport,
    TableRowReport,
)
from biortho.dqpt.models.ssh import SshParams


def read_csv(path: Path):
    with path.open(encoding="utf-8") as f:
        return list(csv.reader(f))


class CommandTestCase(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.out = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def manifest(self):
        return json.loads((self.out / "manifest.json").read_text())


class QuenchCommandTestCase(CommandTestCase):
    def arguments(self, **kwargs):
        values = {
            "eta_i": 0.5,
            "gamma_i": 0.0,
            "eta_f": -0.5,
            "gamma_f": 0.0,
            "cells": 256,
            "t_max": 2.0,
            "t_steps": 11,
            "quad_steps": 64,
            "out": self.out,
        }
        values.update(kwargs)
        return Namespace(**values)

    def test_quench(self):
        self.assertEqual(cmd_quench(self.arguments(), DqptEngine()), 0)

        rate = read_csv(self.out / "rate.csv")
        self.assertEqual(rate[0], ["t", "LR_biortho", "LR_selfnormal"])
        self.assertEqual(len(rate), 12)
        self.assertEqual(read_csv(self.out / "dtop.csv")[0], ["t", "nu"])
        self.assertEqual(read_csv(self.out / "cusps.csv")[0], ["series", "t"])
        self.assertEqual(
            read_csv(self.out / "dtop_jumps.csv")[0], ["t", "delta"]
        )

        manifest = self.manifest()
        self.assertEqual(manifest["command"], "quench")
        self.assertEqual(manifest["spec"]["n_cells"], 256)
        self.assertEqual(
            manifest["outputs"],
            ["rate.csv", "dtop.csv", "cusps.csv", "dtop_jumps.csv"],
        )

    def test_missing_parameters(self):
        with self.assertRaisesRegex(ValidationError, "--gamma-f"):
            cmd_quench(self.arguments(gamma_f=None), DqptEngine())

        self.assertFalse((self.out / "manifest.json").exists())

    def test_invalid_resolution(self):
        with self.assertRaises(ValidationError):
            cmd_quench(self.arguments(t_steps=1), DqptEngine())


class FisherCommandTestCase(CommandTestCase):
    def arguments(self, **kwargs):
        values = {
            "eta_i": -2.0,
            "gamma_i": 1.0,
            "eta_f": 2.0,
            "gamma_f": 1.0,
            "cells": 64,
            "t_max": 2.0,
            "t_steps": 11,
            "quad_steps": 64,
            "n_min": 0,
            "n_max": 2,
            "k_samples": 512,
            "out": self.out,
        }
        values.update(kwargs)
        return Namespace(**values)

    def test_fisher(self):
        self.assertEqual(cmd_fisher(self.arguments(), DqptEngine()), 0)

        fisher = read_csv(self.out / "fisher.csv")
        self.assertEqual(fisher[0], ["n", "k", "re_z", "im_z"])
        self.assertEqual(len(fisher), 3 * 512 + 1)
        self.assertEqual({row[0] for row in fisher[1:]}, {"0", "1", "2"})

        crossings = read_csv(self.out / "crossings.csv")
        self.assertEqual(crossings[0], ["n", "k_c", "t_c", "g_residual"])
        per_branch = {}
        for row in crossings[1:]:
            per_branch[row[0]] = per_branch.get(row[0], 0) + 1
            self.assertGreater(float(row[2]), 0.0)
            self.assertLess(float(row[3]), 1e-6)
        self.assertEqual(per_branch, {"0": 2, "1": 2, "2": 2})

        manifest = self.manifest()
        self.assertEqual(manifest["command"], "fisher")
        self.assertEqual(manifest["outputs"], ["fisher.csv", "crossings.csv"])

    def test_trivial_quench(self):
        arguments = self.arguments(
            eta_i=0.0, gamma_i=2.0, eta_f=0.0, gamma_f=2.0
        )

        self.assertEqual(cmd_fisher(arguments, DqptEngine()), 0)

        self.assertEqual(
            read_csv(self.out / "crossings.csv"),
            [["n", "k_c", "t_c", "g_residual"]],
        )

    def test_inverted_branch_window(self):
        with self.assertRaises(ValidationError):
            cmd_fisher(self.arguments(n_min=3, n_max=1), DqptEngine())

        self.assertFalse((self.out / "manifest.json").exists())


class PhaseDiagramCommandTestCase(CommandTestCase):
    def arguments(self, **kwargs):
        values = {
            "eta_range": (-3.0, 3.0),
            "gamma_range": (0.0, 6.0),
            "grid": 3,
            "k_samples": 256,
            "out": self.out,
        }
        values.update(kwargs)
        return Namespace(**values)

    def test_phase_diagram(self):
        self.assertEqual(cmd_phase_diagram(self.arguments(), DqptEngine()), 0)

        rows = read_csv(self.out / "phases.csv")
        self.assertEqual(
            rows[0], ["eta", "gamma", "region", "winding", "near_boundary"]
        )
        self.assertEqual(len(rows), 10)

        by_point = {
            (float(row[0]), float(row[1])): row[2:] for row in rows[1:]
        }
        self.assertEqual(by_point[(0.0, 0.0)], ["boundary", "", "true"])
        self.assertEqual(by_point[(-3.0, 0.0)], ["IV", "1", "false"])
        self.assertEqual(by_point[(0.0, 6.0)], ["II", "0", "false"])
        self.assertEqual(by_point[(3.0, 3.0)], ["VI", "0", "true"])

    def test_grid_too_small(self):
        with self.assertRaises(ValidationError):
            cmd_phase_diagram(self.arguments(grid=1), DqptEngine())


class SmExampleCommandTestCase(CommandTestCase):
    def test_sm_example(self):
        output = StringIO()
        with redirect_stdout(output):
            status = cmd_sm_example(Namespace(out=self.out), DqptEngine())

        self.assertEqual(status, 0)
        printed = json.loads(output.getvalue())
        self.assertEqual(printed["mismatches"], [])
        self.assertEqual(
            json.loads((self.out / "sm_example.json").read_text()), printed
        )
        self.assertEqual(self.manifest()["command"], "sm-example")


class TableCommandTestCase(CommandTestCase):
    def arguments(self, **kwargs):
        values = {
            "catalog": None,
            "rows": "I-II",
            "cells": 32,
            "t_max": 1.0,
            "t_steps": 5,
            "quad_steps": 16,
            "n_min": 0,
            "n_max": 2,
            "out": self.out,
        }
        values.update(kwargs)
        return Namespace(**values)

    def engine(self, computed):
        expected = QuenchProfile(
            crossing_counts=frozenset({0, 1}),
            jump_sizes=frozenset({Fraction(1)}),
        )
        pre, post = SshParams(-2.0, 5.0), SshParams(0.2, 5.0)
        engine = MagicMock(spec=DqptEngine)
        engine.table_s1_report.return_value = TableReport(
            rows=(
                TableRowReport(
                    label="I-II",
                    forward=DirectionReport(pre, post, expected, expected),
                    reverse=DirectionReport(
                        post, pre, expected, computed, None
                    ),
                ),
            )
        )
        return engine, expected

    def test_passing_table(self):
        engine, _ = self.engine(
            QuenchProfile(
                crossing_counts=frozenset({0, 1}),
                jump_sizes=frozenset({Fraction(1)}),
            )
        )

        self.assertEqual(cmd_table_s1(self.arguments(), engine), 0)

        rows = read_csv(self.out / "table_s1.csv")
        self.assertEqual(len(rows), 3)
        self.assertEqual(rows[1][:2], ["I-II", "forward"])
        self.assertEqual(rows[1][6:11], ["0,1", "0,1", "1", "1", "PASS"])

        pairs = engine.table_s1_report.call_args.args[0]
        self.assertEqual([pair.label for pair in pairs], ["I-II"])
        template = engine.table_s1_report.call_args.kwargs["template"]
        self.assertEqual(template.n_cells, 32)
        self.assertEqual(
            engine.table_s1_report.call_args.kwargs["n_range"], range(0, 3)
        )
        self.assertEqual(self.manifest()["spec"]["rows"], ["I-II"])

    def test_failing_table(self):
        engine, _ = self.engine(None)

        self.assertEqual(cmd_table_s1(self.arguments(), engine), 1)

        rows = read_csv(self.out / "table_s1.csv")
        self.assertEqual(rows[2][1], "reverse")
        self.assertEqual(rows[2][10], "FAIL")

    def test_unknown_rows(self):
        engine, _ = self.engine(None)

        with self.assertRaisesRegex(ValidationError, "VII-VII"):
            cmd_table_s1(self.arguments(rows="I-II,VII-VII"), engine)

    def test_inverted_branch_window(self):
        engine, _ = self.engine(None)

        with self.assertRaises(ValidationError):
            cmd_table_s1(self.arguments(n_min=3, n_max=1), engine)
