#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
"""
Run configuration. Configuration files are XML documents validated and
decoded with the package schema (schemas/gspdc.xsd).
"""
import logging
import os
import pathlib
from dataclasses import dataclass, field, fields, replace
from functools import lru_cache
from typing import Optional, Tuple

import xmlschema

from .analyzer import AnalyzerParams
from .exceptions import ConfigurationError
from .source import SourceParams
from .statkit import Stage, budget_effective, parse_corrections
from .statkit.corrections import DEFAULT_ORDER

logger = logging.getLogger('gspdc')

PACKAGE_DIR = pathlib.Path(__file__).absolute().parent
SCHEMA_FILE = PACKAGE_DIR.joinpath('schemas/gspdc.xsd')
PRESETS_DIR = PACKAGE_DIR.joinpath('presets')


@dataclass(frozen=True)
class AnalysisSettings:
    n_max: Optional[int] = None
    corrections: Tuple[str, ...] = DEFAULT_ORDER
    merge_prob: Optional[float] = None
    eta: Optional[float] = None
    n_uncertainty_samples: int = 10000
    calibration_windows: int = 100000

    def __post_init__(self):
        try:
            object.__setattr__(self, 'corrections', parse_corrections(self.corrections))
        except ValueError as err:
            raise ConfigurationError(str(err)) from None
        if self.n_max is not None and self.n_max < 0:
            raise ConfigurationError("n_max must be non-negative")
        if self.merge_prob is not None and not 0.0 <= self.merge_prob <= 1.0:
            raise ConfigurationError("merge_prob must be a probability")
        if self.eta is not None and not 0.0 < self.eta <= 1.0:
            raise ConfigurationError("eta must be in (0, 1]")
        if self.n_uncertainty_samples < 1000:
            raise ConfigurationError("n_uncertainty_samples must be at least 1000")
        if self.calibration_windows < 1:
            raise ConfigurationError("calibration_windows must be at least 1")


@dataclass(frozen=True)
class RunSettings:
    n_windows: int = 100000
    master_seed: int = 20030
    output_dir: str = 'output'
    workers: int = 1
    save_records: bool = False
    format: str = 'json'

    def __post_init__(self):
        if self.n_windows < 1:
            raise ConfigurationError("n_windows must be at least 1")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")
        if self.format not in ('json', 'csv'):
            raise ConfigurationError("format must be 'json' or 'csv'")


@dataclass(frozen=True)
class RunConfig:
    """
    The complete configuration of a run. The run seed is propagated to the
    source and the analyzer, whose counting window follows the source timing.
    """
    source: SourceParams = field(default_factory=SourceParams)
    analyzer: AnalyzerParams = field(default_factory=AnalyzerParams)
    analysis: AnalysisSettings = field(default_factory=AnalysisSettings)
    run: RunSettings = field(default_factory=RunSettings)
    name: str = 'default'

    def __post_init__(self):
        seed = self.run.master_seed
        if self.source.master_seed != seed:
            object.__setattr__(self, 'source', replace(self.source, master_seed=seed))
        analyzer = replace(self.analyzer, master_seed=seed,
                           window_duration=self.source.window_duration,
                           window_offset=self.source.delay_latency)
        object.__setattr__(self, 'analyzer', analyzer)

    @property
    def eta(self):
        """The efficiency used by the analysis, explicit or from the analyzer budget."""
        if self.analysis.eta is not None:
            return self.analysis.eta
        return self.analyzer.efficiency

    def budget(self):
        if self.analysis.eta is None:
            return self.analyzer.budget()
        return budget_effective([Stage('eta', self.analysis.eta)])

    def updated(self, source=None, analyzer=None, analysis=None, run=None):
        """Returns a copy with the given sections updated with dictionaries of fields."""
        return RunConfig(
            source=replace(self.source, **source) if source else self.source,
            analyzer=replace(self.analyzer, **analyzer) if analyzer else self.analyzer,
            analysis=replace(self.analysis, **analysis) if analysis else self.analysis,
            run=replace(self.run, **run) if run else self.run,
            name=self.name,
        )

    def to_dict(self):
        return {
            'name': self.name,
            'source': self.source.to_dict(),
            'analyzer': self.analyzer.to_dict(),
            'analysis': {f.name: getattr(self.analysis, f.name)
                         for f in fields(self.analysis)},
            'run': {f.name: getattr(self.run, f.name) for f in fields(self.run)},
        }


@lru_cache(maxsize=None)
def get_schema():
    return xmlschema.XMLSchema(str(SCHEMA_FILE))


def _decode(path, root_tag):
    try:
        resource = xmlschema.XMLResource(str(path))
        if resource.root.tag != root_tag:
            raise ConfigurationError("{!r} is not a <{}> document".format(str(path), root_tag))
        return get_schema().to_dict(resource) or {}
    except (xmlschema.XMLSchemaException, SyntaxError) as err:
        raise ConfigurationError("invalid file {!r}: {}".format(str(path), err)) from None


def _stages(items):
    if isinstance(items, dict):
        items = [items]
    return tuple(Stage(s['@name'], s['@efficiency'], s.get('@uncertainty', 0.0))
                 for s in items)


def config_from_dict(obj, name='default'):
    """Builds a `RunConfig` from the decoded form of a <config> document."""
    analyzer = dict(obj.get('analyzer') or {})
    if 'stage' in analyzer:
        analyzer['stages'] = _stages(analyzer.pop('stage'))

    analysis = dict(obj.get('analysis') or {})
    if 'corrections' in analysis:
        analysis['corrections'] = tuple(analysis['corrections'] or ())

    try:
        run = RunSettings(**(obj.get('run') or {}))
        return RunConfig(
            source=SourceParams(master_seed=run.master_seed, **(obj.get('source') or {})),
            analyzer=AnalyzerParams(**analyzer),
            analysis=AnalysisSettings(**analysis),
            run=run,
            name=obj.get('@name', name),
        )
    except TypeError as err:
        raise ConfigurationError(str(err)) from None


def load_config(path):
    """Loads a <config> XML file."""
    if not os.path.isfile(path):
        raise ConfigurationError("configuration file {!r} not found".format(str(path)))
    logger.info("loading configuration from %r", str(path))
    return config_from_dict(_decode(path, 'config'), pathlib.Path(path).stem)


def list_presets():
    return sorted(p.stem for p in PRESETS_DIR.glob('*.xml'))


def load_preset(name):
    """Loads one of the packaged presets by name."""
    path = PRESETS_DIR.joinpath('{}.xml'.format(name))
    if not path.is_file():
        raise ConfigurationError("unknown preset {!r}, available presets are {!r}".format(
            name, list_presets()))
    return load_config(path)


def load_budget(path):
    """Loads a <budget> XML file, returns an `EfficiencyBudget`."""
    if not os.path.isfile(path):
        raise ConfigurationError("budget file {!r} not found".format(str(path)))
    obj = _decode(path, 'budget')
    return budget_effective(_stages(obj.get('stage', ())))
