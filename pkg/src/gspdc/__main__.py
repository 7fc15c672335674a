#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
import sys
import os
import argparse
import logging
import pathlib

from xmlschema.cli import get_loglevel

from gspdc.analyzer import read_histogram
from gspdc.commands import SWEEP_PARAMETERS, cmd_analyze, cmd_compare, cmd_reproduce, \
    cmd_simulate, cmd_sweep
from gspdc.config import list_presets, load_budget, load_config, load_preset
from gspdc.exceptions import AnalysisError, ConfigurationError
from gspdc.reports import TextRenderer, read_distribution
from gspdc.statkit import PhotonDist, parse_corrections

PROGRAM_NAME = os.path.basename(sys.argv[0])

EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_ANALYSIS_ERROR = 4


def float_list(value):
    try:
        return [float(x) for x in value.split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("{!r} is not a comma separated list of "
                                         "numbers".format(value)) from None


def correction_list(value):
    try:
        return parse_corrections(value)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def get_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', dest='verbosity', action='count', default=0,
                        help="increase output verbosity.")
    common.add_argument('--config', type=str, metavar='PATH',
                        help="path to an XML configuration file.")
    common.add_argument('--preset', type=str, metavar='NAME',
                        help="a packaged configuration preset, one of {!r} "
                             "(default is 'experiment').".format(list_presets()))
    common.add_argument('--windows', type=int, metavar='N',
                        help="number of gate windows.")
    common.add_argument('--seed', type=int, metavar='S', help="master seed of the run.")
    common.add_argument('--n-max', dest='n_max', type=int, metavar='K',
                        help="photon-number cutoff of the inversion.")
    common.add_argument('--corrections', type=correction_list, metavar='LIST',
                        help="corrections in application order, e.g. 'deadtime,dark' "
                             "or 'none'.")
    common.add_argument('--eta', type=float, metavar='X',
                        help="detection efficiency, overrides the analyzer budget.")
    common.add_argument('--budget', type=str, metavar='PATH',
                        help="XML file with the efficiency budget of the analyzer.")
    common.add_argument('--merge-prob', dest='merge_prob', type=float, metavar='X',
                        help="dead-time merge probability, calibrated by simulation "
                             "if not given.")
    common.add_argument('--samples', type=int, metavar='N',
                        help="Monte Carlo samples of the uncertainty propagation.")
    common.add_argument('--out', type=str, metavar='DIRECTORY',
                        help="where to write the output files.")
    common.add_argument('--format', choices=('json', 'csv'),
                        help="format of the distribution files.")
    common.add_argument('--workers', type=int, metavar='N',
                        help="number of worker threads.")

    parser = argparse.ArgumentParser(prog=PROGRAM_NAME, add_help=True,
                                     description="simulate a gated SPDC single photon "
                                                 "source and analyze photon counting data.")
    parser.usage = "%(prog)s {simulate,analyze,compare,sweep,reproduce} [OPTION]...\n" \
                   "Try '%(prog)s --help' for more information."
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND', required=True)

    subparsers.add_parser('simulate', parents=[common],
                          help="simulate source and analyzer, write the count histogram.")

    analyze = subparsers.add_parser('analyze', parents=[common],
                                    help="correct and invert observed count fractions.")
    source = analyze.add_mutually_exclusive_group(required=True)
    source.add_argument('--input', type=str, metavar='PATH',
                        help="a histogram CSV or a distribution JSON/CSV file.")
    source.add_argument('--inline', type=float_list, metavar="P0,P1,...",
                        help="observed fractions P'(0), P'(1), ...")

    compare = subparsers.add_parser('compare', parents=[common],
                                    help="compare a distribution with weak coherent light.")
    source = compare.add_mutually_exclusive_group(required=True)
    source.add_argument('--input', type=str, metavar='PATH',
                        help="a distribution JSON/CSV file or an analysis report.")
    source.add_argument('--inline', type=float_list, metavar="P0,P1,...",
                        help="photon-number probabilities P(0), P(1), ...")

    sweep = subparsers.add_parser('sweep', parents=[common],
                                  help="tabulate emission and vacuum-gate rates over a grid.")
    sweep.add_argument('--param', type=str, required=True, choices=SWEEP_PARAMETERS,
                       help="the source parameter to sweep.")
    sweep.add_argument('--values', type=float_list, required=True, metavar='X1,X2,...',
                       help="grid values of the parameter.")
    sweep.add_argument('--mode', choices=('analytic', 'simulate'), default='analytic',
                       help="analytic prediction or simulation per grid point.")

    subparsers.add_parser('reproduce', parents=[common],
                          help="reproduce the experiment with the 'experiment' preset.")
    return parser


def get_config(args):
    if args.config is not None:
        config = load_config(args.config)
    else:
        config = load_preset(args.preset or 'experiment')

    run = {k: v for k, v in (('n_windows', args.windows), ('master_seed', args.seed),
                             ('output_dir', args.out), ('format', args.format),
                             ('workers', args.workers)) if v is not None}
    analysis = {k: v for k, v in (('n_max', args.n_max), ('corrections', args.corrections),
                                  ('eta', args.eta), ('merge_prob', args.merge_prob),
                                  ('n_uncertainty_samples', args.samples)) if v is not None}
    analyzer = {}
    if args.budget is not None:
        analyzer['stages'] = load_budget(args.budget).stages
    return config.updated(analyzer=analyzer, analysis=analysis, run=run)


def read_observed(args):
    """Returns observed fractions, number of windows and histogram echo of analyze input."""
    if args.inline is not None:
        return PhotonDist(args.inline), args.windows, None

    path = pathlib.Path(args.input)
    with path.open() as fp:
        is_histogram = fp.readline().startswith('#')
    if is_histogram:
        histogram, _ = read_histogram(path)
        echo = {'n_windows': histogram.n_windows, 'counts': histogram.counts}
        return histogram.fractions(), histogram.n_windows, echo
    return read_distribution(path), args.windows, None


def run_command(args):
    config = get_config(args)
    renderer = TextRenderer()

    if args.command == 'simulate':
        result = cmd_simulate(config)
        print("Simulated {} windows, P'(1) = {:.4f}".format(
            result.histogram.n_windows, result.histogram.fraction(1)))
    elif args.command == 'analyze':
        observed, n_windows, histogram = read_observed(args)
        report = cmd_analyze(config, observed, n_windows, histogram)
        print(renderer.render('report.txt.jinja', report=report), end='')
    elif args.command == 'compare':
        if args.inline is not None:
            dist = PhotonDist(args.inline)
        else:
            dist = read_distribution(args.input)
        _, text = cmd_compare(config, dist)
        print(text, end='')
    elif args.command == 'sweep':
        rows = cmd_sweep(config, args.param, args.values, args.mode)
        print("Written {} sweep rows".format(len(rows)))
    else:
        outputs = cmd_reproduce(config)
        print(renderer.render('report.txt.jinja', report=outputs['simulated']), end='')


def main(argv=None):
    parser = get_parser()
    args = parser.parse_args(argv)

    loglevel = get_loglevel(args.verbosity)
    logging.basicConfig(format='%(levelname)s: %(message)s')
    logger = logging.getLogger('gspdc')
    logger.setLevel(loglevel)

    try:
        run_command(args)
    except ConfigurationError as err:
        sys.stderr.write("{}: configuration error: {}\n".format(PROGRAM_NAME, err))
        sys.exit(EXIT_CONFIG_ERROR)
    except AnalysisError as err:
        sys.stderr.write("{}: analysis failure: {}\n".format(PROGRAM_NAME, err))
        sys.exit(EXIT_ANALYSIS_ERROR)
    except OSError as err:
        sys.stderr.write("{}: I/O error: {}\n".format(PROGRAM_NAME, err))
        sys.exit(EXIT_IO_ERROR)
    except ValueError as err:
        sys.stderr.write("{}: invalid input: {}\n".format(PROGRAM_NAME, err))
        sys.exit(EXIT_CONFIG_ERROR)


if __name__ == '__main__':
    if sys.version_info < (3, 8, 0):
        sys.stderr.write("You need python 3.8 or later to run this program\n")
        sys.exit(1)

    main()
