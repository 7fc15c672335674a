#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""
Photon number analyzer: efficiency thinning, dark counts and counter dead time.
"""
import csv
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, fields
from typing import Dict, Tuple

import numpy as np
from scipy.stats import chisquare, poisson

from .exceptions import AnalysisError, ConfigurationError
from .source import simulate_run
from .statkit import PhotonDist, Stage, budget_effective
from .streams import window_rng

logger = logging.getLogger('gspdc')

DEFAULT_STAGES = (
    Stage('spcm', 0.70, 0.05),
    Stage('lens_mirror', 0.902),
    Stage('stray_filter', 0.492),
    Stage('fiber_coupler', 0.882),
)


@dataclass(frozen=True)
class AnalyzerParams:
    """
    Detection chain of the photon number analyzer.

    The counting window spans [window_offset, window_offset + window_duration)
    in the delay-shifted time of the emitted photons.
    """
    stages: Tuple[Stage, ...] = DEFAULT_STAGES
    dark_rate: float = 100.0
    dead_time: float = 5.0e-8
    paralyzable: bool = False
    window_duration: float = 1.0e-4
    window_offset: float = 0.0
    master_seed: int = 20030

    def __post_init__(self):
        stages = tuple(Stage(*s) for s in self.stages)
        if not stages:
            raise ConfigurationError("the analyzer needs at least one efficiency stage")
        for stage in stages:
            if not 0.0 < stage.efficiency <= 1.0:
                raise ConfigurationError(
                    "efficiency of stage {!r} out of range (0, 1]".format(stage.name))
            if stage.uncertainty < 0.0:
                raise ConfigurationError(
                    "negative uncertainty for stage {!r}".format(stage.name))
        object.__setattr__(self, 'stages', stages)

        if self.dark_rate < 0.0:
            raise ConfigurationError("dark_rate must be non-negative")
        if self.dead_time < 0.0:
            raise ConfigurationError("dead_time must be non-negative")
        if self.window_duration <= 0.0:
            raise ConfigurationError("window_duration must be positive")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2 ** 64:
            raise ConfigurationError("master_seed must be a 64-bit non-negative integer")

    def budget(self):
        return budget_effective(self.stages)

    @property
    def efficiency(self):
        return math.prod(s.efficiency for s in self.stages)

    @property
    def dark_mean(self):
        """Mean dark counts per counting window."""
        return self.dark_rate * self.window_duration

    def to_dict(self):
        obj = {f.name: getattr(self, f.name) for f in fields(self)}
        obj['stages'] = [s._asdict() for s in self.stages]
        return obj


def count_registered(events, dead_time, paralyzable=False):
    """
    Counts the events of a sorted sequence registered by a counter with *dead_time*.
    A non-paralyzable counter drops events within dead_time after the last
    registered event; a paralyzable one after the last event of any kind.
    """
    registered = 0
    last = -math.inf
    for t in events:
        if t - last >= dead_time:
            registered += 1
            last = t
        elif paralyzable:
            last = t
    return registered


def detect_window(emitted, params, window_index):
    """Returns the number of counts registered for the emitted photons of a window."""
    rng = window_rng(params.master_seed, 'analyzer', window_index)
    emitted = np.asarray(emitted, dtype=float)
    detected = emitted[rng.random(emitted.size) < params.efficiency]

    n_dark = rng.poisson(params.dark_mean)
    dark = rng.uniform(params.window_offset,
                       params.window_offset + params.window_duration, n_dark)
    events = np.sort(np.concatenate((detected, dark)))
    return count_registered(events, params.dead_time, params.paralyzable)


@dataclass(frozen=True)
class CountHistogram:
    """Number of windows with i registered counts, for each observed i."""
    n_windows: int
    counts: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if sum(self.counts.values()) != self.n_windows:
            raise ValueError("histogram counts do not add up to n_windows")

    @property
    def max_count(self):
        return max((i for i, c in self.counts.items() if c), default=0)

    def fraction(self, i):
        return self.counts.get(i, 0) / self.n_windows

    def fractions(self, n_max=None):
        """Returns the observed fractions P'(i) as a `PhotonDist`."""
        if n_max is None:
            n_max = self.max_count
        elif n_max < self.max_count:
            logger.warning("n_max=%d drops counts up to %d", n_max, self.max_count)
        probs = np.zeros(n_max + 1)
        for i, c in self.counts.items():
            if i <= n_max:
                probs[i] = c
        return PhotonDist(probs / self.n_windows)

    def mean(self):
        return sum(i * c for i, c in self.counts.items()) / self.n_windows


def build_histogram(counts):
    """Tallies per-window counts into a `CountHistogram`."""
    tally = Counter(int(c) for c in counts)
    if not tally:
        raise ValueError("cannot build a histogram from no windows")
    return CountHistogram(sum(tally.values()), dict(sorted(tally.items())))


def chi_square_poisson(histogram, mean, min_expected=5.0):
    """
    Goodness of fit of a count histogram against Poisson(*mean*), pooling the
    upper tail so that every bin expects at least *min_expected* windows.
    Returns the (statistic, p-value) pair.
    """
    n = histogram.n_windows
    k = 0
    while poisson.sf(k, mean) * n >= min_expected:
        k += 1
    expected = n * np.append(poisson.pmf(np.arange(k), mean), poisson.sf(k - 1, mean))
    observed = np.array([histogram.counts.get(i, 0) for i in range(k)]
                        + [sum(c for i, c in histogram.counts.items() if i >= k)])
    if expected.size < 2:
        raise ValueError("mean too small for a chi-square test on {} windows".format(n))
    result = chisquare(observed, expected)
    return float(result.statistic), float(result.pvalue)


def calibrate_merge_prob(source, analyzer, n_windows, workers=1, gated_only=False):
    """
    Estimates the probability that two emitted photons of a window register as
    a single count, by simulating the source and the counter dead time with
    unit efficiency and no dark counts.

    :param gated_only: consider only windows whose two photons are both in the gate.
    """
    merged = pairs = 0
    for record in simulate_run(source, n_windows, workers):
        if record.n_emitted != 2:
            continue
        if gated_only:
            gate = record.gate_interval
            if gate is None or not all(gate.t_open <= t < gate.t_close for t in record.emitted):
                continue
        pairs += 1
        merged += count_registered(record.emitted, analyzer.dead_time,
                                   analyzer.paralyzable) == 1

    if not pairs:
        raise AnalysisError("no two-photon windows in {} simulated windows, cannot "
                            "calibrate the dead-time merge probability".format(n_windows))
    logger.debug("merge probability %d/%d", merged, pairs)
    return merged / pairs


def write_histogram(histogram, path, header=None):
    """
    Writes a histogram as a two-column (i, count) CSV preceded by
    a '# {json}' header line with n_windows and *header* items.
    """
    info = {'n_windows': histogram.n_windows}
    if header:
        info.update(header)
    with open(path, 'w', newline='') as fp:
        fp.write('# {}\n'.format(json.dumps(info, sort_keys=True)))
        writer = csv.writer(fp)
        writer.writerow(['i', 'count'])
        for i in range(histogram.max_count + 1):
            writer.writerow([i, histogram.counts.get(i, 0)])


def read_histogram(path):
    """Reads a histogram CSV, returns a (histogram, header) couple."""
    with open(path, newline='') as fp:
        first = fp.readline()
        if not first.startswith('#'):
            raise ValueError("{!r} misses the histogram header line".format(path))
        header = json.loads(first[1:])
        rows = list(csv.DictReader(fp))

    counts = {int(row['i']): int(row['count']) for row in rows if int(row['count'])}
    return CountHistogram(int(header['n_windows']), counts), header
