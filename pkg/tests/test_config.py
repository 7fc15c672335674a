#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
import os
import tempfile
import unittest

import xmlschema

from gspdc.config import PRESETS_DIR, SCHEMA_FILE, AnalysisSettings, RunConfig, \
    RunSettings, config_from_dict, get_schema, list_presets, load_budget, load_config, \
    load_preset
from gspdc.exceptions import ConfigurationError

CONFIG_XML = """<?xml version="1.0" encoding="UTF-8"?>
<config name="test">
  <source>
    <pair_rate>2.0e6</pair_rate>
    <shutter_leakage>0</shutter_leakage>
  </source>
  <analyzer>
    <stage name="spcm" efficiency="0.5" uncertainty="0.02"/>
    <dark_rate>0</dark_rate>
    <paralyzable>true</paralyzable>
  </analyzer>
  <analysis>
    <n_max>3</n_max>
    <corrections>dark</corrections>
    <merge_prob>0.25</merge_prob>
  </analysis>
  <run>
    <n_windows>500</n_windows>
    <master_seed>11</master_seed>
    <format>csv</format>
  </run>
</config>
"""

BUDGET_XML = """<?xml version="1.0" encoding="UTF-8"?>
<budget>
  <stage name="spcm" efficiency="0.60" uncertainty="0.03"/>
  <stage name="optics" efficiency="0.50"/>
</budget>
"""


class TestConfigFiles(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.tmpdir = tempfile.TemporaryDirectory()

    @classmethod
    def tearDownClass(cls):
        cls.tmpdir.cleanup()

    def write_file(self, name, content):
        path = os.path.join(self.tmpdir.name, name)
        with open(path, 'w') as fp:
            fp.write(content)
        return path

    def test_schema(self):
        self.assertTrue(SCHEMA_FILE.is_file())
        schema = get_schema()
        self.assertIsInstance(schema, xmlschema.XMLSchema)
        self.assertIs(schema, get_schema())
        self.assertIn('config', schema.elements)
        self.assertIn('budget', schema.elements)

    def test_presets(self):
        self.assertIn('experiment', list_presets())
        for path in PRESETS_DIR.glob('*.xml'):
            self.assertTrue(get_schema().is_valid(str(path)), msg=str(path))

    def test_experiment_preset(self):
        config = load_preset('experiment')
        self.assertEqual(config.name, 'experiment')
        self.assertAlmostEqual(config.source.mean_control, 8.0)
        self.assertEqual(config.source.shutter_leakage, 1e-3)
        self.assertAlmostEqual(config.analyzer.efficiency, 0.274, delta=5e-4)
        self.assertEqual(config.analyzer.dark_rate, 100.0)
        self.assertFalse(config.analyzer.paralyzable)
        self.assertTupleEqual(config.analysis.corrections, ('deadtime', 'dark'))
        self.assertIsNone(config.analysis.merge_prob)
        self.assertEqual(config.run.n_windows, 100000)
        self.assertEqual(config.run.master_seed, 20030)
        self.assertEqual(config.run.format, 'json')

        with self.assertRaises(ConfigurationError):
            load_preset('unknown')

    def test_load_config(self):
        config = load_config(self.write_file('test.xml', CONFIG_XML))
        self.assertEqual(config.name, 'test')
        self.assertEqual(config.source.pair_rate, 2e6)
        self.assertEqual(config.source.shutter_leakage, 0.0)
        self.assertEqual(config.source.coupling_eff, 0.68)
        self.assertEqual(len(config.analyzer.stages), 1)
        self.assertEqual(config.analyzer.stages[0].uncertainty, 0.02)
        self.assertEqual(config.analyzer.dark_rate, 0.0)
        self.assertTrue(config.analyzer.paralyzable)
        self.assertEqual(config.analysis.n_max, 3)
        self.assertTupleEqual(config.analysis.corrections, ('dark',))
        self.assertEqual(config.analysis.merge_prob, 0.25)
        self.assertEqual(config.run.n_windows, 500)
        self.assertEqual(config.run.format, 'csv')

        # The run seed reaches every stream
        self.assertEqual(config.source.master_seed, 11)
        self.assertEqual(config.analyzer.master_seed, 11)

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            load_config(os.path.join(self.tmpdir.name, 'missing.xml'))
        with self.assertRaises(ConfigurationError):
            load_budget(os.path.join(self.tmpdir.name, 'missing.xml'))

    def test_invalid_files(self):
        path = self.write_file('invalid.xml', CONFIG_XML.replace(
            '<pair_rate>2.0e6</pair_rate>', '<pair_rate>-1</pair_rate>'))
        with self.assertRaises(ConfigurationError):
            load_config(path)

        path = self.write_file('unknown.xml', CONFIG_XML.replace(
            '<pair_rate>2.0e6</pair_rate>', '<pump_power>1</pump_power>'))
        with self.assertRaises(ConfigurationError):
            load_config(path)

        path = self.write_file('malformed.xml', '<config><source></config>')
        with self.assertRaises(ConfigurationError):
            load_config(path)

        path = self.write_file('zero_windows.xml', CONFIG_XML.replace(
            '<n_windows>500</n_windows>', '<n_windows>0</n_windows>'))
        with self.assertRaises(ConfigurationError):
            load_config(path)

    def test_wrong_root(self):
        with self.assertRaises(ConfigurationError):
            load_config(self.write_file('budget_as_config.xml', BUDGET_XML))
        with self.assertRaises(ConfigurationError):
            load_budget(self.write_file('config_as_budget.xml', CONFIG_XML))

    def test_load_budget(self):
        budget = load_budget(self.write_file('budget.xml', BUDGET_XML))
        self.assertEqual([s.name for s in budget.stages], ['spcm', 'optics'])
        self.assertAlmostEqual(budget.effective, 0.30)
        self.assertAlmostEqual(budget.effective_sigma, 0.30 * 0.03 / 0.60)


class TestRunConfig(unittest.TestCase):

    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(config.analyzer.window_duration, config.source.window_duration)
        self.assertEqual(config.analyzer.window_offset, config.source.delay_latency)
        self.assertEqual(config.source.master_seed, config.run.master_seed)
        self.assertAlmostEqual(config.eta, config.analyzer.efficiency)

    def test_eta_override(self):
        config = RunConfig(analysis=AnalysisSettings(eta=0.3))
        self.assertEqual(config.eta, 0.3)
        budget = config.budget()
        self.assertEqual(budget.effective, 0.3)
        self.assertEqual(budget.effective_sigma, 0.0)

    def test_updated(self):
        config = RunConfig()
        other = config.updated(source={'window_duration': 2e-4}, run={'master_seed': 5},
                               analysis={'corrections': 'none'})
        self.assertEqual(other.source.window_duration, 2e-4)
        self.assertEqual(other.analyzer.window_duration, 2e-4)
        self.assertEqual(other.source.master_seed, 5)
        self.assertEqual(other.analyzer.master_seed, 5)
        self.assertTupleEqual(other.analysis.corrections, ())
        self.assertEqual(config.source.window_duration, 1e-4)

        with self.assertRaises(ConfigurationError):
            config.updated(source={'control_det_eff': 2.0})
        with self.assertRaises(TypeError):
            config.updated(source={'pump_power': 1.0})

    def test_to_dict(self):
        obj = RunConfig(name='demo').to_dict()
        self.assertEqual(obj['name'], 'demo')
        self.assertListEqual(sorted(obj), ['analysis', 'analyzer', 'name', 'run', 'source'])
        self.assertEqual(obj['run']['master_seed'], 20030)

    def test_config_from_dict(self):
        config = config_from_dict({'source': {'pair_rate': 5e5}}, name='half')
        self.assertEqual(config.name, 'half')
        self.assertAlmostEqual(config.source.mean_control, 4.0)
        with self.assertRaises(ConfigurationError):
            config_from_dict({'run': {'n_frames': 10}})

    def test_invalid_settings(self):
        with self.assertRaises(ConfigurationError):
            AnalysisSettings(corrections='dark,background')
        with self.assertRaises(ConfigurationError):
            AnalysisSettings(n_uncertainty_samples=100)
        with self.assertRaises(ConfigurationError):
            AnalysisSettings(eta=0.0)
        with self.assertRaises(ConfigurationError):
            RunSettings(workers=0)
        with self.assertRaises(ConfigurationError):
            RunSettings(format='xml')
