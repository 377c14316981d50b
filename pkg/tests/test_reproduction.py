# Copyright (C) 2024 biortho-dqpt developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Full-resolution checks of the quench catalog and the reference quenches

These runs sweep up to 4000 momenta per quench and are only executed with
BIORTHO_DQPT_SLOW_TESTS=1.
"""

import os
import tempfile
import unittest
from argparse import Namespace
from fractions import Fraction
from pathlib import Path

import numpy as np

from biortho.dqpt.commands import cmd_quench
from biortho.dqpt.engine import DqptEngine
from biortho.dqpt.loader import JSONCatalogLoader
from biortho.dqpt.models.quench import QuenchSpec
from biortho.dqpt.models.ssh import Region, SshParams, classify_phase
from biortho.dqpt.utils import worker_count

from . import hermitian

SLOW_TESTS = os.environ.get("BIORTHO_DQPT_SLOW_TESTS") == "1"

HALF = Fraction(1, 2)


def _nearest(times, t: float) -> float:
    if not times:
        return float("inf")
    return float(np.min(np.abs(np.asarray(times) - t)))


@unittest.skipUnless(SLOW_TESTS, "set BIORTHO_DQPT_SLOW_TESTS=1 to run")
class CatalogReproductionTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.pairs = JSONCatalogLoader().load_pairs()
        cls.report = DqptEngine(workers=worker_count()).table_s1_report(
            cls.pairs
        )

    def test_catalog_rows(self):
        for row in self.report.rows:
            with self.subTest(row=row.label):
                self.assertIsNone(row.forward.error)
                self.assertIsNone(row.reverse.error)
                self.assertTrue(row.forward.passed, str(row.forward.computed))
                self.assertTrue(row.reverse.passed, str(row.reverse.computed))

    def test_half_jumps_need_prequench_phase_two_or_five(self):
        for row in self.report.rows:
            for direction in (row.forward, row.reverse):
                with self.subTest(row=row.label, pre=str(direction.pre)):
                    region = classify_phase(direction.pre).region
                    self.assertEqual(
                        HALF in direction.computed.jump_sizes,
                        region in (Region.II, Region.V),
                    )


@unittest.skipUnless(SLOW_TESTS, "set BIORTHO_DQPT_SLOW_TESTS=1 to run")
class ReferenceQuenchTestCase(unittest.TestCase):
    def setUp(self):
        self.engine = DqptEngine(workers=worker_count())

    def test_extra_biorthogonal_cusp(self):
        spec = QuenchSpec(pre=SshParams(0.2, 1.0), post=SshParams(-0.2, 1.0))

        rate = self.engine.loschmidt_rate(spec)
        self_normal = self.engine.self_normal_rate(spec)
        dtop = self.engine.dtop(spec)

        self.assertLessEqual(_nearest(rate.cusps, 0.74), 0.02)
        self.assertGreater(_nearest(self_normal.cusps, 0.74), 0.02)
        self.assertTrue(
            any(
                jump.delta == HALF and abs(jump.time - 0.74) <= 0.02
                for jump in dtop.jumps
            )
        )

    def test_cusps_sit_at_crossings(self):
        spec = QuenchSpec(pre=SshParams(-2.0, 5.0), post=SshParams(2.0, 5.0))

        rate = self.engine.loschmidt_rate(spec)
        branches = self.engine.fisher_branches(spec)

        step = spec.t_max / (spec.t_steps - 1)
        crossings = [
            crossing
            for branch in branches
            for crossing in branch.crossings
            if crossing.t < spec.t_max - step
        ]
        self.assertTrue(crossings)
        for crossing in crossings:
            self.assertLess(crossing.residual, 1e-6)
            self.assertLessEqual(_nearest(rate.cusps, crossing.t), 2 * step)

    def test_rate_converges_with_cells(self):
        spec = QuenchSpec(
            pre=SshParams(-2.0, 5.0),
            post=SshParams(2.0, 5.0),
            n_cells=4000,
            t_steps=500,
        )
        finest = self.engine.loschmidt_rate(spec)
        away = np.array(
            [_nearest(finest.cusps, t) > 0.05 for t in finest.times]
        )

        rates = [
            self.engine.loschmidt_rate(
                QuenchSpec(
                    pre=spec.pre,
                    post=spec.post,
                    n_cells=cells,
                    t_steps=spec.t_steps,
                )
            ).rate
            for cells in (500, 1000, 2000)
        ] + [finest.rate]
        deviations = [
            float(np.max(np.abs(coarse - fine)[away]))
            for coarse, fine in zip(rates, rates[1:])
        ]

        self.assertEqual(deviations, sorted(deviations, reverse=True))

    def test_hermitian_dtop_matches_reference(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            eta_i, eta_f = rng.choice([-1, 1], 2) * rng.uniform(0.2, 1.5, 2)
            spec = QuenchSpec(
                pre=SshParams(eta_i, 0.0),
                post=SshParams(eta_f, 0.0),
                n_cells=400,
                t_max=3.0,
                t_steps=31,
            )
            with self.subTest(eta_i=eta_i, eta_f=eta_f):
                dtop = self.engine.dtop(spec)
                reference = hermitian.dtop(
                    eta_i, eta_f, spec.k_grid(), spec.t_grid()
                )

                np.testing.assert_array_equal(
                    np.round(dtop.nu), np.round(reference)
                )


@unittest.skipUnless(SLOW_TESTS, "set BIORTHO_DQPT_SLOW_TESTS=1 to run")
class DeterminismTestCase(unittest.TestCase):
    def test_outputs_do_not_depend_on_workers(self):
        outputs = []
        with tempfile.TemporaryDirectory() as directory:
            for workers in (1, 4):
                out = Path(directory) / str(workers)
                arguments = Namespace(
                    eta_i=0.2,
                    gamma_i=5.0,
                    eta_f=2.0,
                    gamma_f=5.0,
                    cells=2000,
                    t_max=5.0,
                    t_steps=2000,
                    quad_steps=512,
                    out=out,
                )
                cmd_quench(arguments, DqptEngine(workers=workers))
                outputs.append(
                    {
                        name: (out / name).read_bytes()
                        for name in ("rate.csv", "dtop.csv", "cusps.csv")
                    }
                )

        self.assertEqual(outputs[0], outputs[1])
