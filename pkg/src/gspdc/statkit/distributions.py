#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""
Photon-number distributions and the binomial loss channel.

A detector of efficiency eta registers i of j incident photons with
probability C(j, i) eta^i (1 - eta)^(j - i), so the observed count fractions
are P'(i) = sum_j>=i C(j, i) eta^i (1 - eta)^(j - i) P(j).
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular
from scipy.stats import binom, poisson

from ..exceptions import NegativeMassError
from .constants import TOLERANCES

logger = logging.getLogger('gspdc')


@dataclass(frozen=True, eq=False)
class PhotonDist:
    """
    A photon-number (or count) distribution truncated at *n_max*.

    :param probs: probabilities indexed by photon number j = 0..n_max.
    :param sigma: optional 1-sigma uncertainties, same shape as *probs*.
    :param remainder: probability mass beyond n_max left out of *probs*.
    """
    probs: np.ndarray
    sigma: Optional[np.ndarray] = None
    remainder: float = 0.0

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("a distribution needs a non-empty 1-D probability vector")
        object.__setattr__(self, 'probs', probs)

        if self.sigma is not None:
            sigma = np.array(self.sigma, dtype=float)
            if sigma.shape != probs.shape:
                raise ValueError("sigma must have the same shape of probs")
            object.__setattr__(self, 'sigma', sigma)

    @classmethod
    def from_mapping(cls, mapping, n_max=None):
        """Builds a distribution from a {j: probability} mapping."""
        if not mapping:
            raise ValueError("empty distribution mapping")
        if any(int(j) < 0 for j in mapping):
            raise ValueError("photon numbers must be non-negative")
        size = max(int(j) for j in mapping) + 1 if n_max is None else n_max + 1
        probs = np.zeros(size)
        for j, p in mapping.items():
            probs[int(j)] = p
        return cls(probs)

    @classmethod
    def from_dict(cls, obj):
        """Builds a distribution from its JSON form (see `to_dict`)."""
        probs = obj['probs']
        if 'n_max' in obj and obj['n_max'] != len(probs) - 1:
            raise ValueError("n_max does not match the length of probs")
        return cls(probs, obj.get('sigma'), obj.get('remainder', 0.0))

    def to_dict(self):
        obj = {'n_max': self.n_max, 'probs': self.probs.tolist()}
        if self.sigma is not None:
            obj['sigma'] = self.sigma.tolist()
        if self.remainder:
            obj['remainder'] = float(self.remainder)
        return obj

    def rows(self):
        """Iterates (j, P(j), sigma(j)) tuples, sigma is `None` when not available."""
        for j, p in enumerate(self.probs):
            yield j, float(p), None if self.sigma is None else float(self.sigma[j])

    @property
    def n_max(self):
        return self.probs.size - 1

    @property
    def total(self):
        return float(self.probs.sum())

    def __getitem__(self, j):
        return float(self.probs[j]) if 0 <= j <= self.n_max else 0.0

    def __len__(self):
        return self.probs.size

    def __repr__(self):
        return '%s(probs=%r)' % (self.__class__.__name__, self.probs.tolist())

    def is_normalized(self, tol=TOLERANCES.normalization):
        return abs(self.total + self.remainder - 1.0) <= tol

    def normalized(self):
        """Returns a copy rescaled to unit total, flagging deviations beyond tolerance."""
        total = self.total
        if total <= 0.0:
            raise ValueError("cannot normalize a distribution with no mass")
        if abs(total - 1.0) > TOLERANCES.normalization:
            logger.warning("renormalizing a distribution with total %.12g", total)
        sigma = None if self.sigma is None else self.sigma / total
        return PhotonDist(self.probs / total, sigma)

    def padded(self, n_max):
        """Returns the distribution zero-padded or cut to *n_max*."""
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        probs = np.zeros(n_max + 1)
        size = min(n_max, self.n_max) + 1
        probs[:size] = self.probs[:size]
        if self.sigma is None:
            return PhotonDist(probs)
        sigma = np.zeros(n_max + 1)
        sigma[:size] = self.sigma[:size]
        return PhotonDist(probs, sigma)

    def highest_count(self):
        """The highest index with a non-zero probability."""
        nonzero = np.flatnonzero(self.probs)
        return int(nonzero[-1]) if nonzero.size else 0


def check_efficiency(eta, allow_zero=True):
    if not (0.0 <= eta <= 1.0) or (not allow_zero and eta == 0.0):
        raise ValueError("efficiency {!r} out of range {}".format(
            eta, '[0, 1]' if allow_zero else '(0, 1]'))


def clip_negative(probs, step='inversion', tol=TOLERANCES.negative_mass):
    """
    Clips negative components within *tol* to zero, raising a `NegativeMassError`
    for anything more negative.
    """
    probs = np.array(probs, dtype=float)
    index = int(np.argmin(probs))
    if probs[index] < -tol:
        raise NegativeMassError(index, float(probs[index]), step)
    if probs[index] < 0.0:
        logger.debug("%s: clipped negative mass down to %.3e", step, probs[index])
        probs[probs < 0.0] = 0.0
    return probs


def loss_matrix(n_max, eta):
    """Upper triangular matrix B with B[i, j] = C(j, i) eta^i (1 - eta)^(j - i)."""
    n = np.arange(n_max + 1)
    return binom.pmf(n[:, None], n[None, :], eta)


def forward_loss(dist, eta):
    """Applies the binomial loss channel of efficiency *eta* to *dist*."""
    check_efficiency(eta)
    return PhotonDist(loss_matrix(dist.n_max, eta) @ dist.probs)


def invert_loss(observed, eta, n_max=None):
    """
    Recovers the incident distribution from observed count fractions by
    back-substitution of the loss channel truncated at *n_max*.

    :param observed: the observed fractions P'(i).
    :param eta: detection efficiency in (0, 1].
    :param n_max: photon-number cutoff, defaults to the highest observed count.
    """
    check_efficiency(eta, allow_zero=False)
    highest = observed.highest_count()
    if n_max is None:
        n_max = highest
    elif n_max < highest:
        raise ValueError("n_max={} is below the highest observed count {}".format(
            n_max, highest))

    counts = observed.padded(n_max).probs
    probs = solve_triangular(loss_matrix(n_max, eta), counts, lower=False)
    return PhotonDist(clip_negative(probs, 'loss inversion'))


def poisson_dist(mu, n_max):
    """
    Returns the Poisson (weak coherent light) distribution of mean *mu*
    truncated at *n_max*, with the tail mass in `remainder`.
    """
    if mu < 0:
        raise ValueError("mean photon number must be non-negative")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if mu == 0:
        return PhotonDist(np.eye(1, n_max + 1, 0).ravel())

    n = np.arange(n_max + 1)
    return PhotonDist(poisson.pmf(n, mu), remainder=float(poisson.sf(n_max, mu)))
