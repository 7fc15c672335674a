#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""
Detection efficiency budget and Monte Carlo propagation of its uncertainty
(and of the counting error) through the loss inversion.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
from scipy.stats import truncnorm

from ..streams import window_rng
from .distributions import PhotonDist, check_efficiency, invert_loss

logger = logging.getLogger('gspdc')

CHUNK_SIZE = 1000


class Stage(NamedTuple):
    """An element of the detection chain: transmittance or quantum efficiency."""
    name: str
    efficiency: float
    uncertainty: float = 0.0


@dataclass(frozen=True)
class EfficiencyBudget:
    stages: Tuple[Stage, ...]
    effective: float
    effective_sigma: float

    def to_rows(self):
        for stage in self.stages:
            yield stage.name, stage.efficiency, stage.uncertainty
        yield 'effective', self.effective, self.effective_sigma


def budget_effective(stages):
    """
    Multiplies the stage efficiencies, propagating independent absolute
    uncertainties at first order.
    """
    stages = tuple(Stage(*s) for s in stages)
    if not stages:
        raise ValueError("an efficiency budget needs at least one stage")

    for stage in stages:
        if not 0.0 < stage.efficiency <= 1.0:
            raise ValueError("efficiency of stage {!r} out of range (0, 1]".format(stage.name))
        if stage.uncertainty < 0.0:
            raise ValueError("negative uncertainty for stage {!r}".format(stage.name))

    effective = math.prod(s.efficiency for s in stages)
    relative = math.sqrt(sum((s.uncertainty / s.efficiency) ** 2 for s in stages))
    return EfficiencyBudget(stages, effective, effective * relative)


def _sample_chunk(observed, budget, n_max, n_windows, seed, index, size):
    rng = window_rng(seed, 'uncertainty', index)
    if budget.effective_sigma > 0.0:
        loc, scale = budget.effective, budget.effective_sigma
        etas = truncnorm.rvs((0.0 - loc) / scale, (1.0 - loc) / scale, loc=loc,
                             scale=scale, size=size, random_state=rng)
    else:
        etas = np.full(size, budget.effective)

    if n_windows:
        fractions = rng.multinomial(n_windows, observed.probs, size=size) / n_windows
    else:
        fractions = np.broadcast_to(observed.probs, (size, observed.probs.size))

    return np.array([
        invert_loss(PhotonDist(f), float(eta), n_max).probs
        for f, eta in zip(fractions, etas)
    ])


def propagate_eta_uncertainty(observed, budget, n_samples=10000, n_windows=None,
                              n_max=None, seed=0, workers=1):
    """
    Estimates mean and standard deviation of the inverted distribution under
    a truncated normal efficiency and, if *n_windows* is given, the multinomial
    counting error of the observed fractions.

    :param observed: observed count fractions P'(i), normalized.
    :param budget: an `EfficiencyBudget`.
    :param n_samples: number of Monte Carlo samples, at least 1000.
    :param n_windows: number of windows behind *observed*, `None` to skip counting error.
    :param n_max: photon-number cutoff of the inversion.
    :param seed: seed of the sampling streams.
    :param workers: number of threads sampling in parallel.
    """
    if n_samples < 1000:
        raise ValueError("at least 1000 samples are required")
    check_efficiency(budget.effective, allow_zero=False)
    if n_max is None:
        n_max = observed.highest_count()
    observed = observed.padded(n_max).normalized()

    if budget.effective_sigma == 0.0 and not n_windows:
        point = invert_loss(observed, budget.effective, n_max)
        return PhotonDist(point.probs, np.zeros_like(point.probs))

    chunks = [(k, min(CHUNK_SIZE, n_samples - start))
              for k, start in enumerate(range(0, n_samples, CHUNK_SIZE))]

    def sample(chunk):
        return _sample_chunk(observed, budget, n_max, n_windows, seed, *chunk)

    logger.debug("propagating efficiency uncertainty with %d samples", n_samples)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            samples = np.concatenate(list(executor.map(sample, chunks)))
    else:
        samples = np.concatenate([sample(chunk) for chunk in chunks])

    return PhotonDist(samples.mean(axis=0), samples.std(axis=0, ddof=1))
