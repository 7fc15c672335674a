#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""
Analysis reports, output files and text summaries.
"""
import csv
import json
import logging
import pathlib
import platform
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import jinja2
import numpy as np
import scipy
import xmlschema

from . import __version__
from .statkit import PhotonDist

logger = logging.getLogger('gspdc')

PACKAGE_DIR = pathlib.Path(__file__).absolute().parent


def fp17(value):
    """Formats a float at 17 significant digits."""
    return '%.17g' % value


@dataclass
class Report:
    """The outcome of an analysis, every number recomputable from config and seed."""
    config: Dict[str, Any]
    observed: PhotonDist
    corrected: PhotonDist
    estimate: PhotonDist
    eta: float
    eta_sigma: float
    corrections: List[str]
    merge_prob: Optional[float]
    dark_mean: float
    diagnostics: Dict[str, Any]
    comparators: Optional[Dict[str, Any]] = None
    histogram: Optional[Dict[str, Any]] = None
    flags: List[str] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self):
        return {
            'config': self.config,
            'histogram': self.histogram,
            'observed': self.observed.to_dict(),
            'corrections': {
                'applied': self.corrections,
                'dark_mean': self.dark_mean,
                'merge_prob': self.merge_prob,
                'order_sensitivity': self.diagnostics.get('order_sensitivity'),
            },
            'corrected': self.corrected.to_dict(),
            'eta': {'value': self.eta, 'sigma': self.eta_sigma},
            'estimate': self.estimate.to_dict(),
            'diagnostics': self.diagnostics,
            'comparators': self.comparators,
            'flags': self.flags,
            'provenance': self.provenance,
        }


def provenance(seed, wall_time):
    return {
        'seed': seed,
        'wall_time': wall_time,
        'versions': {
            'gspdc': __version__,
            'python': platform.python_version(),
            'numpy': np.__version__,
            'scipy': scipy.__version__,
            'xmlschema': xmlschema.__version__,
            'jinja2': jinja2.__version__,
        },
    }


def _to_builtin(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    elif isinstance(obj, np.ndarray):
        return obj.tolist()
    elif isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError("{!r} is not JSON serializable".format(obj))


def write_json(obj, path):
    with open(path, 'w') as fp:
        json.dump(obj, fp, indent=2, default=_to_builtin)
        fp.write('\n')
    logger.info("written %r", str(path))


def write_csv(path, header, rows):
    """Writes rows to a CSV file, floats at 17 significant digits."""
    with open(path, 'w', newline='') as fp:
        writer = csv.writer(fp)
        writer.writerow(header)
        for row in rows:
            writer.writerow(['' if v is None else fp17(v) if isinstance(v, float) else v
                             for v in row])
    logger.info("written %r", str(path))


def write_distribution(dist, path, fmt='json'):
    """Writes a `PhotonDist` as JSON {n_max, probs, sigma?} or CSV (j, P, sigma)."""
    if fmt == 'json':
        write_json(dist.to_dict(), path)
    elif fmt == 'csv':
        write_csv(path, ['j', 'P', 'sigma'], dist.rows())
    else:
        raise ValueError("unknown distribution format {!r}".format(fmt))


def read_distribution(path):
    """Reads a `PhotonDist` from a JSON or a (j, P[, sigma]) CSV file."""
    path = pathlib.Path(path)
    if path.suffix == '.json':
        with path.open() as fp:
            obj = json.load(fp)
        return PhotonDist.from_dict(obj.get('estimate', obj))

    with path.open(newline='') as fp:
        rows = list(csv.DictReader(fp))
    if not rows:
        raise ValueError("{!r} contains no distribution rows".format(str(path)))
    probs = {int(row['j']): float(row['P']) for row in rows}
    dist = PhotonDist.from_mapping(probs)
    if all(row.get('sigma') for row in rows):
        sigma = np.zeros(dist.n_max + 1)
        for row in rows:
            sigma[int(row['j'])] = float(row['sigma'])
        dist = PhotonDist(dist.probs, sigma)
    return dist


class TextRenderer:
    """
    Renders the text summaries with Jinja2 templates. Templates are searched
    in *searchpath*, if provided, and then in the package templates.
    """
    searchpaths = ['templates/']

    def __init__(self, searchpath=None):
        loaders = []
        if searchpath is not None:
            loaders.append(jinja2.FileSystemLoader(searchpath))
        loaders.append(jinja2.FileSystemLoader(
            [str(PACKAGE_DIR.joinpath(p)) for p in self.searchpaths]
        ))
        self._env = jinja2.Environment(
            loader=jinja2.ChoiceLoader(loaders),
            undefined=jinja2.StrictUndefined,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
        self._env.filters.update(
            fp17=fp17,
            fixed=lambda v, digits=4: 'n/a' if v is None else '{:.{}f}'.format(v, digits),
            sci=lambda v, digits=3: 'n/a' if v is None else '{:.{}e}'.format(v, digits),
        )

    def list_templates(self):
        return sorted(self._env.list_templates(extensions=['jinja']))

    def render(self, name, **context):
        return self._env.get_template(name).render(**context)

    def render_to_file(self, name, path, **context):
        text = self.render(name, **context)
        with open(path, 'w') as fp:
            fp.write(text)
        logger.info("written %r", str(path))
        return text
