#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""Exception classes of the gspdc package."""


class GspdcError(Exception):
    """Base class of the package errors."""


class ConfigurationError(GspdcError, ValueError):
    """Raised for invalid or inconsistent source, analyzer or run settings."""


class AnalysisError(GspdcError, ArithmeticError):
    """Raised when a statistical correction or estimate cannot be computed."""


class NegativeMassError(AnalysisError):
    """
    Raised when an inversion produces a probability below the negative-mass
    tolerance, usually a model mismatch or a too small photon-number cutoff.
    """
    def __init__(self, index, value, step='inversion'):
        self.index = index
        self.value = value
        self.step = step
        super().__init__("{} produced P({}) = {:.3e}, beyond the negative-mass "
                         "tolerance".format(step, index, value))


class NonInvertibleError(AnalysisError):
    """Raised when a correction channel has no inverse for the given data."""


class UndefinedStatisticError(AnalysisError):
    """Raised for statistics undefined on a distribution (e.g. Fano factor of vacuum)."""
