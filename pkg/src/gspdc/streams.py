#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""
Counter-based random streams.

Each stochastic step draws from its own Philox stream, keyed by the master
seed and a stream tag, with the window (or chunk) index placed in the counter.
Every window therefore gets the same variates whatever the evaluation order
or the number of workers.
"""
from functools import lru_cache

import numpy as np

STREAM_TAGS = {
    'pairs': 0,
    'control': 1,
    'signal': 2,
    'correlation': 3,
    'analyzer': 4,
    'uncertainty': 5,
}


@lru_cache(maxsize=None)
def stream_key(master_seed, tag):
    """Returns the 128-bit Philox key of a tagged stream."""
    if master_seed < 0:
        raise ValueError("master seed must be a non-negative integer")
    try:
        spawn_key = (STREAM_TAGS[tag],)
    except KeyError:
        raise ValueError("unknown stream tag {!r}".format(tag)) from None

    seed_sequence = np.random.SeedSequence(master_seed, spawn_key=spawn_key)
    return tuple(int(x) for x in seed_sequence.generate_state(2, np.uint64))


def window_rng(master_seed, tag, index):
    """
    Returns the generator of stream *tag* for the window (or chunk) *index*.

    :param master_seed: the run seed, a non-negative integer.
    :param tag: one of the names in `STREAM_TAGS`.
    :param index: a non-negative integer below 2**64.
    """
    if not 0 <= index < 2 ** 64:
        raise ValueError("stream index out of range: {!r}".format(index))
    bit_generator = np.random.Philox(key=stream_key(master_seed, tag),
                                     counter=[0, 0, index, 0])
    return np.random.Generator(bit_generator)
