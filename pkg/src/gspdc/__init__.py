#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
__version__ = '0.1.0'

from .exceptions import GspdcError, ConfigurationError, AnalysisError, \
    NegativeMassError, NonInvertibleError, UndefinedStatisticError
from .source import SourceParams, PairEvent, GateInterval, WindowRecord, generate_pairs, \
    detect_control, gate_controller, propagate_signal, simulate_run, predict_emission
from .analyzer import AnalyzerParams, CountHistogram, detect_window, build_histogram, \
    calibrate_merge_prob
from .config import RunConfig, load_config, load_preset, load_budget

__all__ = ['GspdcError', 'ConfigurationError', 'AnalysisError', 'NegativeMassError',
           'NonInvertibleError', 'UndefinedStatisticError', 'SourceParams', 'PairEvent',
           'GateInterval', 'WindowRecord', 'generate_pairs', 'detect_control',
           'gate_controller', 'propagate_signal', 'simulate_run', 'predict_emission',
           'AnalyzerParams', 'CountHistogram', 'detect_window', 'build_histogram',
           'calibrate_merge_prob', 'RunConfig', 'load_config', 'load_preset', 'load_budget']
