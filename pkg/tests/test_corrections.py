#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
import unittest

import numpy as np
from scipy.stats import poisson

from gspdc.exceptions import NegativeMassError, NonInvertibleError
from gspdc.statkit import TOLERANCES, PhotonDist, apply_corrections, dark_correct, \
    deadtime_correct, order_sensitivity, parse_corrections


def add_dark(dist, dark_mean):
    kernel = poisson.pmf(np.arange(dist.n_max + 1), dark_mean)
    return PhotonDist(np.convolve(dist.probs, kernel)[:dist.n_max + 1])


def merge_pairs(dist, merge_prob):
    probs = dist.probs.copy()
    probs[1] += merge_prob * probs[2]
    probs[2] *= 1.0 - merge_prob
    return PhotonDist(probs)


class TestDarkCorrection(unittest.TestCase):

    def test_dark_correct(self):
        clean = PhotonDist([0.92, 0.075, 0.005])
        observed = add_dark(clean, 0.01)
        self.assertGreater(observed[1], clean[1])
        np.testing.assert_allclose(dark_correct(observed, 0.01).probs, clean.probs,
                                   atol=1e-12)

    def test_no_dark_counts(self):
        observed = PhotonDist([0.9, 0.1])
        self.assertIs(dark_correct(observed, 0.0), observed)
        with self.assertRaises(ValueError):
            dark_correct(observed, -0.1)

    def test_dark_excess(self):
        # Fewer empty windows than the dark counts alone would give
        with self.assertRaises(NegativeMassError):
            dark_correct(PhotonDist([0.5, 0.0, 0.5]), 1.0)


class TestDeadtimeCorrection(unittest.TestCase):

    def test_deadtime_correct(self):
        clean = PhotonDist([0.92, 0.075, 0.005])
        observed = merge_pairs(clean, 0.3)
        np.testing.assert_allclose(deadtime_correct(observed, 0.3).probs, clean.probs,
                                   atol=1e-12)

    def test_identity_cases(self):
        observed = PhotonDist([0.9, 0.1, 0.0])
        self.assertIs(deadtime_correct(observed, 0.0), observed)
        single = PhotonDist([0.9, 0.1])
        self.assertIs(deadtime_correct(single, 0.5), single)

    def test_higher_counts_untouched(self):
        observed = PhotonDist([0.9, 0.07, 0.02, 0.01])
        self.assertEqual(deadtime_correct(observed, 0.5)[3], 0.01)

    def test_full_merge(self):
        observed = PhotonDist([0.9, 0.1, 0.0])
        self.assertIs(deadtime_correct(observed, 1.0), observed)
        with self.assertRaises(NonInvertibleError):
            deadtime_correct(PhotonDist([0.9, 0.09, 0.01]), 1.0)

    def test_invalid_merge_prob(self):
        with self.assertRaises(ValueError):
            deadtime_correct(PhotonDist([0.9, 0.09, 0.01]), 1.2)


class TestCorrectionPipeline(unittest.TestCase):

    def test_parse_corrections(self):
        self.assertTupleEqual(parse_corrections('deadtime,dark'), ('deadtime', 'dark'))
        self.assertTupleEqual(parse_corrections(' dark '), ('dark',))
        self.assertTupleEqual(parse_corrections(['dark', 'deadtime']), ('dark', 'deadtime'))
        self.assertTupleEqual(parse_corrections('none'), ())
        self.assertTupleEqual(parse_corrections(''), ())
        self.assertTupleEqual(parse_corrections(()), ())

        with self.assertRaises(ValueError):
            parse_corrections('dark,background')
        with self.assertRaises(ValueError):
            parse_corrections('dark,dark')

    def test_apply_corrections(self):
        clean = PhotonDist([0.92, 0.075, 0.005])
        observed = add_dark(merge_pairs(clean, 0.3), 0.01)
        corrected = apply_corrections(observed, ('dark', 'deadtime'), 0.01, 0.3)
        np.testing.assert_allclose(corrected.probs, clean.probs, atol=1e-12)
        self.assertTrue(corrected.is_normalized())

    def test_no_corrections(self):
        observed = PhotonDist([0.9199, 0.0794, 0.0005])
        corrected = apply_corrections(observed, (), 0.01, 0.3)
        np.testing.assert_allclose(corrected.probs, observed.normalized().probs)

    def test_order_sensitivity(self):
        observed = PhotonDist([0.9199, 0.0794, 0.0005])
        self.assertEqual(order_sensitivity(observed, 0.0, 0.3), 0.0)
        sensitivity = order_sensitivity(observed, 0.01, 0.3)
        self.assertGreaterEqual(sensitivity, 0.0)
        self.assertLess(sensitivity, 1e-4)

    def test_counting_tolerance(self):
        self.assertEqual(TOLERANCES.correction_tol(), TOLERANCES.negative_mass)
        self.assertEqual(TOLERANCES.correction_tol(1000), 3e-3)
        self.assertEqual(TOLERANCES.correction_tol(10 ** 12), TOLERANCES.negative_mass)

        # No two-count window where dark counts predict about one in a thousand
        observed = PhotonDist([0.9, 0.1, 0.0])
        with self.assertRaises(NegativeMassError):
            apply_corrections(observed, ('dark',), 0.01)
        corrected = apply_corrections(observed, ('dark',), 0.01, n_windows=1000)
        self.assertEqual(corrected[2], 0.0)
        self.assertTrue(corrected.is_normalized())
