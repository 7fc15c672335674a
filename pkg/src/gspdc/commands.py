#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""
End-to-end pipelines behind the command line subcommands.
"""
import logging
import pathlib
import time
from collections import Counter
from typing import NamedTuple, Optional

from .analyzer import CountHistogram, build_histogram, calibrate_merge_prob, \
    count_registered, detect_window, write_histogram
from .exceptions import AnalysisError, ConfigurationError, UndefinedStatisticError
from .reports import Report, TextRenderer, provenance, write_csv, write_distribution, \
    write_json
from .source import predict_emission, simulate_run, tee_records
from .statkit import PhotonDist, apply_corrections, compare_wcl, fano, g2_zero, \
    implied_coupling, invert_loss, mean_photon, multiphoton_ratio, order_sensitivity, \
    propagate_eta_uncertainty, rate_sweep, vacuum_gate_prob

logger = logging.getLogger('gspdc')

SWEEP_PARAMETERS = ('pair_rate', 'window_duration', 'control_det_eff')

ORDER_SENSITIVITY_WARNING = 1e-4

PUBLISHED_COUNTS = PhotonDist([0.9199, 0.0794, 0.0005])
"""Registered count fractions of the experiment, 1e5 output pulses."""

PUBLISHED_ESTIMATE = PhotonDist([0.724, 0.265, 0.011])
"""Published photon-number distribution of the source output."""


class SimulationResult(NamedTuple):
    histogram: CountHistogram
    """Registered counts per window."""
    emission: CountHistogram
    """Photons emitted by the source per window, before the analyzer."""
    mean_control: float
    vacuum_gate_fraction: float
    merge_prob: Optional[float]
    """Fraction of two-photon windows registering a single count, `None` without any."""


def output_dir(config, subdir=None):
    path = pathlib.Path(config.run.output_dir)
    if subdir:
        path = path.joinpath(subdir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def run_simulation(config, records_path=None):
    """Simulates source and analyzer, tallying registered and emitted counts."""
    registered = []
    emitted = Counter()
    control = no_gate = two_photon = merged = 0

    records = simulate_run(config.source, config.run.n_windows, config.run.workers)
    if records_path is not None:
        records = tee_records(records, records_path)

    for record in records:
        registered.append(detect_window(record.emitted, config.analyzer, record.window_index))
        emitted[record.n_emitted] += 1
        control += record.control_detections.size
        no_gate += record.gate_interval is None
        if record.n_emitted == 2:
            two_photon += 1
            merged += count_registered(record.emitted, config.analyzer.dead_time,
                                       config.analyzer.paralyzable) == 1

    n_windows = config.run.n_windows
    return SimulationResult(
        histogram=build_histogram(registered),
        emission=CountHistogram(n_windows, dict(sorted(emitted.items()))),
        mean_control=control / n_windows,
        vacuum_gate_fraction=no_gate / n_windows,
        merge_prob=merged / two_photon if two_photon else None,
    )


def cmd_simulate(config, subdir=None):
    """Runs the simulation and writes the histogram files, returns the result."""
    out = output_dir(config, subdir)
    records_path = out.joinpath('records.ndjson') if config.run.save_records else None
    result = run_simulation(config, records_path)

    header = {
        'kind': 'registered',
        'mean_control': result.mean_control,
        'vacuum_gate_fraction': result.vacuum_gate_fraction,
        'config': config.to_dict(),
    }
    write_histogram(result.histogram, out.joinpath('histogram.csv'), header)
    write_histogram(result.emission, out.joinpath('emission.csv'),
                    dict(header, kind='emitted'))

    TextRenderer().render_to_file(
        'simulate.txt.jinja', out.joinpath('simulate.txt'),
        config=config, result=result,
        expected_vacuum=vacuum_gate_prob(config.source.mean_control),
        n_rows=max(result.histogram.max_count, result.emission.max_count) + 1,
    )
    return result


def resolve_merge_prob(config):
    """The dead-time merge probability, calibrated by simulation if not configured."""
    if 'deadtime' not in config.analysis.corrections:
        return None
    if config.analysis.merge_prob is not None:
        return config.analysis.merge_prob

    logger.info("calibrating the dead-time merge probability on %d windows",
                config.analysis.calibration_windows)
    return calibrate_merge_prob(config.source, config.analyzer,
                                config.analysis.calibration_windows, config.run.workers)


def analyze(config, observed, n_windows=None, merge_prob=None, histogram=None):
    """
    Corrects and inverts observed count fractions, returns a `Report`.

    :param config: a `RunConfig`.
    :param observed: observed count fractions P'(i).
    :param n_windows: number of windows behind *observed*, to fold counting error.
    :param merge_prob: dead-time merge probability, overrides the configured one.
    :param histogram: the source histogram, echoed in the report.
    """
    start = time.perf_counter()
    analysis = config.analysis
    flags = []

    if not observed.is_normalized():
        flags.append("observed fractions sum to {:.6f}, renormalized".format(observed.total))
    observed = observed.normalized()

    if merge_prob is None:
        merge_prob = resolve_merge_prob(config)
    dark_mean = config.analyzer.dark_mean
    corrected = apply_corrections(observed, analysis.corrections, dark_mean, merge_prob or 0.0,
                                  n_windows)

    diagnostics = {}
    if set(analysis.corrections) == {'dark', 'deadtime'}:
        try:
            sensitivity = order_sensitivity(observed, dark_mean, merge_prob, n_windows)
        except AnalysisError as err:
            logger.warning("reversed correction order failed: %s", err)
            flags.append("correction order sensitivity undefined: {}".format(err))
            sensitivity = None
        diagnostics['order_sensitivity'] = sensitivity
        if sensitivity is not None and sensitivity > ORDER_SENSITIVITY_WARNING:
            logger.warning("correction order changes P'(i) by up to %.3e", sensitivity)
            flags.append("correction order sensitivity {:.3e}".format(sensitivity))

    n_max = analysis.n_max
    if n_max is not None and n_max < corrected.highest_count():
        raise ConfigurationError("n_max={} is below the highest observed count {}".format(
            n_max, corrected.highest_count()))

    budget = config.budget()
    point = invert_loss(corrected, budget.effective, n_max)
    spread = propagate_eta_uncertainty(corrected, budget, analysis.n_uncertainty_samples,
                                       n_windows, point.n_max, config.run.master_seed,
                                       config.run.workers)
    estimate = PhotonDist(point.probs, spread.sigma)

    diagnostics.update(describe(estimate, config, flags))
    comparators = None
    if diagnostics['mean_photon'] > 0.0:
        comparison = compare_wcl(estimate)
        comparators = {
            'mu_by_mean': comparison.mu_by_mean,
            'mu_by_p2': comparison.mu_by_p2,
            'wcl_mean_p1': comparison.by_mean[1],
            'wcl_mean_p2': comparison.by_mean[2],
            'wcl_p2_p1': None if comparison.by_p2 is None else comparison.by_p2[1],
            'p1_advantage': comparison.p1_advantage,
            'p2_suppression': comparison.p2_suppression,
        }
        if comparison.by_p2 is None:
            flags.append("P(2)={:.6f} is unreachable by weak coherent light, "
                         "no same-P(2) comparator".format(estimate[2]))

    return Report(
        config=config.to_dict(),
        observed=observed,
        corrected=corrected,
        estimate=estimate,
        eta=budget.effective,
        eta_sigma=budget.effective_sigma,
        corrections=list(analysis.corrections),
        merge_prob=merge_prob,
        dark_mean=dark_mean,
        diagnostics=diagnostics,
        comparators=comparators,
        histogram=histogram,
        flags=flags,
        provenance=provenance(config.run.master_seed, time.perf_counter() - start),
    )


def describe(dist, config, flags):
    """Moments and rates of an estimated distribution, undefined values flagged."""
    mean = mean_photon(dist)
    diagnostics = {'mean_photon': mean}
    for name, func in (('fano', fano), ('g2_zero', g2_zero),
                       ('multiphoton_ratio', multiphoton_ratio)):
        try:
            diagnostics[name] = func(dist)
        except UndefinedStatisticError as err:
            diagnostics[name] = None
            flags.append("{} undefined: {}".format(name, err))

    source = config.source
    diagnostics['vacuum_gate_prob'] = vacuum_gate_prob(source.mean_control)
    try:
        diagnostics['implied_coupling'] = implied_coupling(
            mean, source.path_transmittance, source.mean_control)
    except UndefinedStatisticError:
        diagnostics['implied_coupling'] = None
    return diagnostics


def cmd_analyze(config, observed, n_windows=None, histogram=None, subdir=None,
                merge_prob=None):
    """Analyzes observed fractions and writes report and distribution files."""
    report = analyze(config, observed, n_windows, merge_prob, histogram)
    out = output_dir(config, subdir)
    fmt = config.run.format
    write_json(report.to_dict(), out.joinpath('report.json'))
    write_distribution(report.estimate, out.joinpath('distribution.{}'.format(fmt)), fmt)
    TextRenderer().render_to_file('report.txt.jinja', out.joinpath('report.txt'),
                                  report=report)
    return report


def cmd_compare(config, dist, subdir=None):
    """
    Compares a distribution with weak coherent light of same mean and same P(2),
    writing the bar series CSV and the comparison table.
    """
    comparison = compare_wcl(dist)
    out = output_dir(config, subdir)
    write_csv(out.joinpath('fig2.csv'), ['j', 'P_source', 'P_wcl_mean', 'P_wcl_p2'],
              comparison.rows())
    text = TextRenderer().render_to_file('compare.txt.jinja', out.joinpath('compare.txt'),
                                         comparison=comparison)
    return comparison, text


def sweep(config, parameter, values, mode='analytic'):
    """
    Returns (value, P(0), P(1), P(2), vacuum-gate probability) rows over a grid
    of a source parameter, analytic or simulated with the configured seed.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigurationError("cannot sweep {!r}, choose among {!r}".format(
            parameter, SWEEP_PARAMETERS))
    if not values:
        raise ConfigurationError("empty sweep grid")
    if mode not in ('analytic', 'simulate'):
        raise ConfigurationError("unknown sweep mode {!r}".format(mode))

    rows = []
    for value in values:
        point = config.updated(source={parameter: float(value)})
        if mode == 'analytic':
            dist = predict_emission(point.source, 2)
            vacuum = vacuum_gate_prob(point.source.mean_control)
        else:
            result = run_simulation(point)
            dist = result.emission.fractions(max(2, result.emission.max_count))
            vacuum = result.vacuum_gate_fraction
        rows.append((float(value), dist[0], dist[1], dist[2], vacuum))
        logger.debug("sweep %s=%g: P(1)=%.4f", parameter, value, dist[1])
    return rows


def cmd_sweep(config, parameter, values, mode='analytic', subdir=None):
    rows = sweep(config, parameter, values, mode)
    out = output_dir(config, subdir)
    write_csv(out.joinpath('sweep.csv'),
              [parameter, 'P0', 'P1', 'P2', 'vacuum_gate_prob'], rows)
    return rows


def cmd_reproduce(config):
    """
    Reproduces the experiment: simulation, analysis of the simulated histogram,
    analysis of the published counts read as raw and as already corrected data
    (the raw reading may fail with a negative mass, recorded in failure.json),
    WCL comparisons and the vacuum-gate rate table.
    """
    result = cmd_simulate(config, 'simulated')
    histogram = {'n_windows': result.histogram.n_windows,
                 'counts': result.histogram.counts}
    merge_prob = result.merge_prob if config.analysis.merge_prob is None \
        else config.analysis.merge_prob
    simulated = cmd_analyze(config, result.histogram.fractions(), result.histogram.n_windows,
                            histogram, 'simulated', merge_prob)
    cmd_compare(config, simulated.estimate, 'simulated')

    n_pulses = 100000
    try:
        raw = cmd_analyze(config, PUBLISHED_COUNTS, n_pulses, subdir='published_raw',
                          merge_prob=merge_prob)
    except AnalysisError as err:
        # Read as raw data, the quoted P'(2) is below the dark coincidence level
        logger.warning("published counts as raw data: %s", err)
        raw = None
        write_json({'error': str(err), 'corrections': list(config.analysis.corrections),
                    'merge_prob': merge_prob},
                   output_dir(config, 'published_raw').joinpath('failure.json'))
    corrected = cmd_analyze(config.updated(analysis={'corrections': ()}), PUBLISHED_COUNTS,
                            n_pulses, subdir='published_corrected')
    cmd_compare(config, PUBLISHED_ESTIMATE, 'published')

    out = output_dir(config)
    grid = [config.source.mean_control * f for f in (0.0, 0.125, 0.25, 0.5, 1.0, 2.0)]
    write_csv(out.joinpath('rate.csv'), ['mean_control', 'vacuum_gate_prob'], rate_sweep(grid))
    return {'simulation': result, 'simulated': simulated,
            'published_raw': raw, 'published_corrected': corrected}
