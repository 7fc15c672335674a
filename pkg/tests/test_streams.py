#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
import unittest

import numpy as np

from gspdc.streams import STREAM_TAGS, stream_key, window_rng


class TestStreams(unittest.TestCase):

    def test_stream_tags(self):
        self.assertEqual(len(set(STREAM_TAGS.values())), len(STREAM_TAGS))
        self.assertIn('pairs', STREAM_TAGS)
        self.assertIn('analyzer', STREAM_TAGS)

    def test_stream_key(self):
        key = stream_key(7, 'pairs')
        self.assertEqual(len(key), 2)
        self.assertEqual(key, stream_key(7, 'pairs'))
        self.assertNotEqual(key, stream_key(8, 'pairs'))
        self.assertNotEqual(key, stream_key(7, 'control'))

    def test_same_window_same_variates(self):
        first = window_rng(20030, 'signal', 12).random(10)
        second = window_rng(20030, 'signal', 12).random(10)
        np.testing.assert_array_equal(first, second)

    def test_independent_windows_and_tags(self):
        base = window_rng(20030, 'signal', 12).random(10)
        self.assertFalse(np.array_equal(base, window_rng(20030, 'signal', 13).random(10)))
        self.assertFalse(np.array_equal(base, window_rng(20030, 'control', 12).random(10)))
        self.assertFalse(np.array_equal(base, window_rng(20031, 'signal', 12).random(10)))

    def test_evaluation_order(self):
        forward = [window_rng(1, 'pairs', k).random() for k in range(5)]
        backward = [window_rng(1, 'pairs', k).random() for k in reversed(range(5))]
        self.assertListEqual(forward, backward[::-1])

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            window_rng(-1, 'pairs', 0)
        with self.assertRaises(ValueError):
            window_rng(1, 'unknown', 0)
        with self.assertRaises(ValueError):
            window_rng(1, 'pairs', -1)
        with self.assertRaises(ValueError):
            window_rng(1, 'pairs', 2 ** 64)
