#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""
Discrete-event Monte Carlo of the gated SPDC source.

Each gate window draws a Poisson number of simultaneous signal/control pairs.
The first detected control photon opens the shutter after the gate latency,
while signal photons travel through the fiber delay line and reach the
shutter delay_latency later. Photons inside the open window pass with the
shutter transmittance, the others leak through the closed shutter.
"""
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import NamedTuple, Optional

import numpy as np
from scipy.stats import poisson

from .exceptions import ConfigurationError
from .statkit import PhotonDist
from .streams import window_rng

logger = logging.getLogger('gspdc')

DEFAULT_CHUNK_SIZE = 1000


@dataclass(frozen=True)
class SourceParams:
    """Timing and efficiency parameters of the source, defaults from the experiment."""

    pair_rate: float = 1.0e6
    window_duration: float = 1.0e-4
    control_det_eff: float = 0.08
    coupling_eff: float = 0.68
    delay_transmittance: float = 0.50
    delay_latency: float = 1.75e-7
    gate_latency: float = 1.5e-7
    shutter_open: float = 5.0e-8
    shutter_transmittance: float = 0.83
    shutter_leakage: float = 1.0e-3
    pair_correlation: float = 1.0
    master_seed: int = 20030

    def __post_init__(self):
        for name in ('control_det_eff', 'coupling_eff', 'delay_transmittance',
                     'shutter_transmittance', 'shutter_leakage', 'pair_correlation'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigurationError("{} must be a probability".format(name))
        for name in ('window_duration', 'delay_latency', 'gate_latency', 'shutter_open'):
            if not getattr(self, name) > 0.0:
                raise ConfigurationError("{} must be a positive duration".format(name))

        if self.pair_rate < 0.0 or not math.isfinite(self.pair_rate):
            raise ConfigurationError("pair_rate must be a finite non-negative rate")
        if self.shutter_leakage > self.shutter_transmittance:
            raise ConfigurationError("shutter_leakage exceeds shutter_transmittance")
        if self.delay_latency < self.gate_latency:
            raise ConfigurationError("delay_latency is shorter than gate_latency: heralded "
                                     "photons would reach the shutter before it opens")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2 ** 64:
            raise ConfigurationError("master_seed must be a 64-bit non-negative integer")

    @property
    def mean_pairs(self):
        return self.pair_rate * self.window_duration

    @property
    def mean_control(self):
        """Mean control detections per window."""
        return self.pair_rate * self.window_duration * self.control_det_eff

    @property
    def path_transmittance(self):
        """Delay line and open shutter transmittance of the signal path."""
        return self.delay_transmittance * self.shutter_transmittance

    @property
    def signal_transmittance(self):
        """Emission probability of the signal photon of a heralding pair."""
        return self.coupling_eff * self.path_transmittance

    @property
    def repetition_rate(self):
        return 1.0 / self.window_duration

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


class PairEvent(NamedTuple):
    """A signal/control pair created at time *t* within the window."""
    t: float


class GateInterval(NamedTuple):
    t_open: float
    t_close: float


@dataclass(frozen=True, eq=False)
class WindowRecord:
    """
    The outcome of one gate window. Pair, detection and emission times are kept
    as sorted float arrays; `pair_events()` gives the pairs as `PairEvent` items.
    """
    window_index: int
    pairs: np.ndarray
    control_detections: np.ndarray
    gate_interval: Optional[GateInterval]
    emitted: np.ndarray

    def pair_events(self):
        return [PairEvent(float(t)) for t in self.pairs]

    @property
    def n_emitted(self):
        return self.emitted.size

    def to_dict(self):
        gate = self.gate_interval
        return {
            'window_index': self.window_index,
            'pairs': [{'t': float(t)} for t in self.pairs],
            'control_detections': self.control_detections.tolist(),
            'gate_interval': None if gate is None else {
                't_open': gate.t_open, 't_close': gate.t_close
            },
            'emitted': self.emitted.tolist(),
        }

    @classmethod
    def from_dict(cls, obj):
        gate = obj['gate_interval']
        return cls(
            window_index=obj['window_index'],
            pairs=np.array([p['t'] for p in obj['pairs']], dtype=float),
            control_detections=np.array(obj['control_detections'], dtype=float),
            gate_interval=None if gate is None else GateInterval(gate['t_open'],
                                                                 gate['t_close']),
            emitted=np.array(obj['emitted'], dtype=float),
        )


def generate_pairs(params, window_index):
    """Returns the sorted creation times of the pairs of a window."""
    rng = window_rng(params.master_seed, 'pairs', window_index)
    n_pairs = rng.poisson(params.mean_pairs)
    return np.sort(rng.uniform(0.0, params.window_duration, n_pairs))


def detect_control(pairs, params, window_index):
    """Thins the pair times with the control detection efficiency."""
    rng = window_rng(params.master_seed, 'control', window_index)
    pairs = np.asarray(pairs, dtype=float)
    return pairs[rng.random(pairs.size) < params.control_det_eff]


def gate_controller(control_detections, params):
    """Opens one gate after the first control detection, `None` if there is none."""
    if len(control_detections) == 0:
        return None
    t_open = control_detections[0] + params.gate_latency
    return GateInterval(float(t_open), float(t_open + params.shutter_open))


def propagate_signal(pairs, gate_interval, params, window_index):
    """
    Propagates the signal photons through fiber coupling, delay line and shutter.
    Returns the sorted shutter-arrival times of the emitted photons.

    The same uniform variates decide every stage for any parameter values, so
    raising a transmittance never removes an emitted photon.
    """
    pairs = np.asarray(pairs, dtype=float)
    rng = window_rng(params.master_seed, 'signal', window_index)
    draws = rng.random((3, pairs.size))

    arrivals = pairs + params.delay_latency
    if params.pair_correlation < 1.0:
        crng = window_rng(params.master_seed, 'correlation', window_index)
        uncorrelated = crng.random(pairs.size) >= params.pair_correlation
        retimed = crng.uniform(0.0, params.window_duration, pairs.size) + params.delay_latency
        arrivals = np.where(uncorrelated, retimed, arrivals)

    survived = (draws[0] < params.coupling_eff) & (draws[1] < params.delay_transmittance)
    if gate_interval is None:
        inside = np.zeros(pairs.size, dtype=bool)
    else:
        t_open, t_close = gate_interval
        if t_open >= params.window_duration + params.delay_latency:
            raise ConfigurationError("gate opens at {:.6g} s, after every signal photon of "
                                     "the window has reached the shutter".format(t_open))
        inside = (arrivals >= t_open) & (arrivals < t_close)

    pass_prob = np.where(inside, params.shutter_transmittance, params.shutter_leakage)
    emitted = survived & (draws[2] < pass_prob)
    return np.sort(arrivals[emitted])


def simulate_window(params, window_index):
    pairs = generate_pairs(params, window_index)
    control_detections = detect_control(pairs, params, window_index)
    gate_interval = gate_controller(control_detections, params)
    emitted = propagate_signal(pairs, gate_interval, params, window_index)
    return WindowRecord(window_index, pairs, control_detections, gate_interval, emitted)


def simulate_chunk(params, start, stop):
    return [simulate_window(params, k) for k in range(start, stop)]


def simulate_run(params, n_windows, workers=1, chunk_size=DEFAULT_CHUNK_SIZE):
    """
    Yields the `WindowRecord` of each window in window-index order.

    :param params: a `SourceParams` instance.
    :param n_windows: number of windows, at least 1.
    :param workers: number of threads, output is the same for any value.
    :param chunk_size: number of windows simulated by a single task.
    """
    if n_windows < 1:
        raise ConfigurationError("n_windows must be at least 1")
    if workers < 1:
        raise ConfigurationError("workers must be at least 1")

    logger.info("simulating %d windows with %d worker(s)", n_windows, workers)
    chunks = [(start, min(start + chunk_size, n_windows))
              for start in range(0, n_windows, chunk_size)]

    if workers == 1:
        for start, stop in chunks:
            yield from simulate_chunk(params, start, stop)
        return

    with ThreadPoolExecutor(max_workers=workers) as executor:
        # Bounded waves keep memory flat for long runs
        wave = 2 * workers
        for k in range(0, len(chunks), wave):
            futures = [executor.submit(simulate_chunk, params, start, stop)
                       for start, stop in chunks[k:k + wave]]
            for future in futures:
                yield from future.result()
            logger.debug("simulated %d windows", chunks[min(k + wave, len(chunks)) - 1][1])


def predict_emission(params, n_max=2):
    """
    First-order analytic distribution of the number of emitted photons per window.

    Without a control detection (probability exp(-m)) only leakage photons are
    emitted. Otherwise the heralded photon passes with `signal_transmittance`
    and the other pairs add Poisson photons, through the open gate or leaking.
    """
    collected = params.pair_rate * params.coupling_eff * params.delay_transmittance
    leak_mean = collected * params.window_duration * params.shutter_leakage
    extra_mean = collected * params.shutter_open * (
        params.shutter_transmittance - params.shutter_leakage)
    p_gate = 1.0 - math.exp(-params.mean_control)

    n = np.arange(n_max + 1)
    no_gate = poisson.pmf(n, leak_mean)
    herald = np.zeros(n_max + 1)
    herald[0] = 1.0 - params.signal_transmittance
    if n_max >= 1:
        herald[1] = params.signal_transmittance
    gated = np.convolve(herald, poisson.pmf(n, leak_mean + extra_mean))[:n_max + 1]

    probs = (1.0 - p_gate) * no_gate + p_gate * gated
    return PhotonDist(probs, remainder=max(0.0, 1.0 - float(probs.sum())))


def tee_records(records, path):
    """Yields the records while writing them as newline-delimited JSON."""
    with open(path, 'w') as fp:
        for record in records:
            fp.write(json.dumps(record.to_dict()))
            fp.write('\n')
            yield record


def write_records(records, path):
    """Writes window records as newline-delimited JSON, returns the number written."""
    return sum(1 for _ in tee_records(records, path))


def read_records(path):
    with open(path) as fp:
        for line in fp:
            if line.strip():
                yield WindowRecord.from_dict(json.loads(line))
