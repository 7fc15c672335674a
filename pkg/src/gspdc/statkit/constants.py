#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances of the analysis routines."""

    negative_mass: float = 1e-9
    """Negative probabilities above -negative_mass are clipped to zero."""

    normalization: float = 1e-9
    """Allowed deviation of a total probability from 1 before flagging."""

    bisection: float = 1e-12
    """Absolute accuracy of the WCL mean-photon root search."""

    counting_windows: float = 3.0
    """
    Negative mass left by the corrections of a histogram of N windows is clipped
    up to counting_windows / N, the resolution of a few windows.
    """

    def correction_tol(self, n_windows=None):
        """The negative-mass tolerance of the count corrections."""
        if not n_windows:
            return self.negative_mass
        return max(self.negative_mass, self.counting_windows / n_windows)


TOLERANCES = Tolerances()
