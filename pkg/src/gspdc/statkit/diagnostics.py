#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""
Moments of photon-number distributions and weak coherent light comparators.
"""
import logging
import math
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import bisect

from ..exceptions import UndefinedStatisticError
from .constants import TOLERANCES
from .distributions import PhotonDist, poisson_dist

logger = logging.getLogger('gspdc')

MAX_WCL_P2 = 2.0 * math.exp(-2.0)  # the peak of the Poisson pmf at n=2, reached at mu=2


def _moments(dist):
    n = np.arange(dist.n_max + 1)
    mean = float(n @ dist.probs)
    factorial2 = float((n * (n - 1)) @ dist.probs)
    return mean, factorial2


def mean_photon(dist):
    return _moments(dist)[0]


def fano(dist):
    """Fano factor (<n^2> - <n>^2) / <n>."""
    mean, factorial2 = _moments(dist)
    if mean == 0.0:
        raise UndefinedStatisticError("Fano factor is undefined for <n> = 0")
    return (factorial2 + mean - mean ** 2) / mean


def g2_zero(dist):
    """Zero-delay second-order correlation <n(n-1)> / <n>^2."""
    mean, factorial2 = _moments(dist)
    if mean == 0.0:
        raise UndefinedStatisticError("g2(0) is undefined for <n> = 0")
    return factorial2 / mean ** 2


def multiphoton_ratio(dist):
    """The fraction of non-empty pulses carrying two or more photons."""
    non_empty = float(dist.probs[1:].sum())
    if non_empty == 0.0:
        raise UndefinedStatisticError("no non-empty pulses")
    return float(dist.probs[2:].sum()) / non_empty


def match_wcl_by_mean(dist):
    """The mean photon number of weak coherent light with the same <n> of *dist*."""
    return mean_photon(dist)


def match_wcl_by_p2(target_p2, tol=TOLERANCES.bisection):
    """
    The mean photon number of weak coherent light whose two-photon probability
    equals *target_p2*, taking the smaller root on (0, 2).
    """
    if target_p2 < 0.0 or target_p2 > MAX_WCL_P2:
        raise ValueError("P(2)={!r} is unreachable by a Poisson distribution "
                         "(max {:.6f})".format(target_p2, MAX_WCL_P2))
    if target_p2 == 0.0:
        return 0.0
    return bisect(lambda mu: math.exp(-mu) * mu * mu / 2.0 - target_p2, 0.0, 2.0, xtol=tol)


class WclComparison(NamedTuple):
    """
    Source distribution against weak coherent light of same <n> and same P(2).
    The P(2) comparator is `None` when no Poisson distribution reaches the
    source P(2), that is above `MAX_WCL_P2`.
    """
    source: PhotonDist
    by_mean: PhotonDist
    by_p2: Optional[PhotonDist]
    mu_by_mean: float
    mu_by_p2: Optional[float]

    @property
    def p1_advantage(self):
        """P(1) of the source over P(1) of WCL with the same P(2), `None` if undefined."""
        if self.by_p2 is None or self.by_p2[1] == 0.0:
            return None
        return self.source[1] / self.by_p2[1]

    @property
    def p2_suppression(self):
        """P(2) of the source over P(2) of WCL with the same mean photon number."""
        return self.source[2] / self.by_mean[2]

    def rows(self):
        for j in range(self.source.n_max + 1):
            p_p2 = None if self.by_p2 is None else self.by_p2[j]
            yield j, self.source[j], self.by_mean[j], p_p2


def compare_wcl(dist):
    """Builds the weak coherent light comparators of *dist*."""
    mu_mean = match_wcl_by_mean(dist)
    if mu_mean == 0.0:
        raise UndefinedStatisticError("cannot compare a vacuum distribution with WCL")
    n_max = max(dist.n_max, 2)
    source = dist.padded(n_max)
    if source[2] > MAX_WCL_P2:
        logger.info("P(2)=%.6f is above any weak coherent light, no P(2) comparator",
                    source[2])
        mu_p2 = by_p2 = None
    else:
        mu_p2 = match_wcl_by_p2(source[2])
        by_p2 = poisson_dist(mu_p2, n_max)
    return WclComparison(source, poisson_dist(mu_mean, n_max), by_p2, mu_mean, mu_p2)


def vacuum_gate_prob(mean_control):
    """Probability that a window has no control detection, hence no gate."""
    if mean_control < 0:
        raise ValueError("mean control detections must be non-negative")
    return math.exp(-mean_control)


def rate_sweep(grid):
    """Tabulates (m, exp(-m)) for mean control detections per window *m*."""
    return [(float(m), vacuum_gate_prob(m)) for m in grid]


def implied_coupling(mean_photon_number, path_transmittance, mean_control):
    """
    The collection efficiency implied by a measured mean output photon number,
    given the transmittance of the stages after the collection fiber.
    """
    heralded = path_transmittance * (1.0 - vacuum_gate_prob(mean_control))
    if heralded <= 0.0:
        raise UndefinedStatisticError("no heralded transmission to compare with")
    return mean_photon_number / heralded
