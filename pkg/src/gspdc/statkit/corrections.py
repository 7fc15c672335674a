#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""
Corrections of registered count fractions for dark counts and counter dead time.
"""
import logging

import numpy as np
from scipy.linalg import solve_triangular, toeplitz
from scipy.stats import poisson

from ..exceptions import NonInvertibleError
from .constants import TOLERANCES
from .distributions import PhotonDist, check_efficiency, clip_negative

logger = logging.getLogger('gspdc')

DEFAULT_ORDER = ('deadtime', 'dark')


def dark_correct(observed, dark_mean, tol=TOLERANCES.negative_mass):
    """
    Removes an independent additive Poisson(*dark_mean*) count from the
    observed fractions, solving the truncated convolution by forward substitution.
    Negative results above -*tol* are clipped.
    """
    if dark_mean < 0:
        raise ValueError("mean dark count must be non-negative")
    if dark_mean == 0:
        return observed

    kernel = poisson.pmf(np.arange(observed.n_max + 1), dark_mean)
    first_row = np.zeros_like(kernel)
    first_row[0] = kernel[0]
    probs = solve_triangular(toeplitz(kernel, first_row), observed.probs, lower=True)
    return PhotonDist(clip_negative(probs, 'dark correction', tol))


def deadtime_correct(observed, merge_prob, tol=TOLERANCES.negative_mass):
    """
    Inverts the two-photon merge channel of the counter dead time: a window
    with two counts registers 2 with probability 1 - merge_prob, else 1.
    Counts above 2 are left untouched.
    """
    check_efficiency(merge_prob)
    if merge_prob == 0.0 or observed.n_max < 2:
        return observed

    probs = observed.probs.copy()
    if merge_prob == 1.0:
        if probs[2] > tol:
            raise NonInvertibleError("every two-count window merges (merge_prob=1), "
                                     "the observed 2-count mass cannot be explained")
        return observed

    two_counts = probs[2] / (1.0 - merge_prob)
    probs[1] -= merge_prob * two_counts
    probs[2] = two_counts
    return PhotonDist(clip_negative(probs, 'dead-time correction', tol))


CORRECTIONS = {
    'dark': lambda dist, dark_mean, merge_prob, tol: dark_correct(dist, dark_mean, tol),
    'deadtime': lambda dist, dark_mean, merge_prob, tol: deadtime_correct(dist, merge_prob, tol),
}


def parse_corrections(value):
    """
    Parses a correction list, as a comma separated string or a sequence,
    into a tuple of correction names. 'none' and '' give an empty tuple.
    """
    if isinstance(value, str):
        value = [x.strip() for x in value.split(',')]
    names = tuple(x for x in value if x and x != 'none')
    for name in names:
        if name not in CORRECTIONS:
            raise ValueError("unknown correction {!r}, choose among {!r}".format(
                name, tuple(CORRECTIONS)))
    if len(set(names)) != len(names):
        raise ValueError("duplicated correction in {!r}".format(names))
    return names


def apply_corrections(observed, corrections=DEFAULT_ORDER, dark_mean=0.0, merge_prob=0.0,
                      n_windows=None):
    """
    Applies the named corrections in sequence and renormalizes the result.

    :param observed: registered count fractions P'(i).
    :param corrections: correction names in application order.
    :param dark_mean: mean dark counts per window.
    :param merge_prob: dead-time merge probability of a two-count window.
    :param n_windows: number of windows behind *observed*, `None` for exact fractions.
    """
    tol = TOLERANCES.correction_tol(n_windows)
    dist = observed
    for name in parse_corrections(corrections):
        dist = CORRECTIONS[name](dist, dark_mean, merge_prob, tol)
    return dist.normalized()


def order_sensitivity(observed, dark_mean, merge_prob, n_windows=None):
    """Max absolute difference between the two correction orders."""
    forward = apply_corrections(observed, DEFAULT_ORDER, dark_mean, merge_prob, n_windows)
    backward = apply_corrections(observed, DEFAULT_ORDER[::-1], dark_mean, merge_prob,
                                 n_windows)
    return float(np.max(np.abs(forward.probs - backward.probs)))
