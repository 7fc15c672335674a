#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
from .constants import Tolerances, TOLERANCES
from .distributions import PhotonDist, forward_loss, invert_loss, poisson_dist, loss_matrix
from .corrections import dark_correct, deadtime_correct, apply_corrections, \
    order_sensitivity, parse_corrections
from .diagnostics import mean_photon, fano, g2_zero, multiphoton_ratio, match_wcl_by_mean, \
    match_wcl_by_p2, compare_wcl, WclComparison, vacuum_gate_prob, rate_sweep, implied_coupling
from .uncertainty import Stage, EfficiencyBudget, budget_effective, propagate_eta_uncertainty

__all__ = ['Tolerances', 'TOLERANCES', 'PhotonDist', 'forward_loss', 'invert_loss',
           'poisson_dist', 'loss_matrix', 'dark_correct', 'deadtime_correct',
           'apply_corrections', 'order_sensitivity', 'parse_corrections', 'mean_photon',
           'fano', 'g2_zero', 'multiphoton_ratio', 'match_wcl_by_mean', 'match_wcl_by_p2',
           'compare_wcl', 'WclComparison', 'vacuum_gate_prob', 'rate_sweep',
           'implied_coupling', 'Stage', 'EfficiencyBudget', 'budget_effective',
           'propagate_eta_uncertainty']
