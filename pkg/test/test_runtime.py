"""Unit tests for kkkpsim runtime."""

import contextlib
import csv
import io
import json
import logging
import pathlib
import tempfile
import unittest

from kkkpsim.adversary import PulseChoice
from kkkpsim.json_config import default_run_options
from kkkpsim.protocol import ProtocolVariant
from kkkpsim.runtime import EXIT_DETECTED, EXIT_OK, RunConfig, Runtime

HERE = pathlib.Path(__file__).resolve().parent

TEST_RUN_CONFIG_PATH = pathlib.Path(HERE, 'examples', 'run_config', 'example_initial.json')
TEST_TRANSCRIPT_PATH = pathlib.Path(HERE, 'examples', 'transcripts', 'example_two_rounds.jsonl')

_LOG = logging.getLogger(__name__)


class Tests(unittest.TestCase):

    def setUp(self):
        with tempfile.NamedTemporaryFile(suffix='.json') as tmp_file:
            self.config_path = pathlib.Path(tmp_file.name)

    def execute(self, runtime, command, **options):
        output = io.StringIO()
        with contextlib.redirect_stdout(output):
            exit_code = runtime.execute(command, **options)
        return exit_code, output.getvalue()

    def test_run_config(self):
        config = RunConfig.from_options(default_run_options(), rounds=10, variant=None)
        self.assertIs(config.variant, ProtocolVariant.MODIFIED)
        self.assertEqual(config.rounds, 10)
        self.assertIsNone(config.strategy)
        self.assertIsNone(config.transcript_path)
        config = RunConfig.from_options(
            default_run_options(), attack='impersonation', eve_pulse='second', transcript='t.jsonl')
        self.assertIs(config.strategy.pulse_choice, PulseChoice.ALWAYS_SECOND)
        self.assertEqual(config.transcript_path, pathlib.Path('t.jsonl'))

    def test_bad_run_config(self):
        for options in ({'variant': 'quantum'}, {'attack': 'intercept'}, {'eve_shuffle': '2'},
                        {'eve_pulse': 'both'}, {'rounds': 0}, {'rounds': True}, {'seed': -1},
                        {'seed': 2 ** 64}, {'output': 'xml'}):
            with self.subTest(options=options):
                with self.assertRaises(ValueError):
                    RunConfig.from_options(default_run_options(), **options)

    def test_configured_defaults(self):
        runtime = Runtime(TEST_RUN_CONFIG_PATH)
        exit_code, output = self.execute(runtime, 'run')
        self.assertEqual(exit_code, EXIT_OK)
        report = json.loads(output)
        self.assertEqual(report['variant'], 'original')
        self.assertEqual(report['strategy'], 'mimic/first')
        self.assertEqual(report['rounds'], 2000)
        self.assertEqual(report['errors'], 0)
        self.assertEqual(report['eve_key_accuracy'], 1.0)

    def test_run_detected(self):
        runtime = Runtime(self.config_path)
        exit_code, output = self.execute(
            runtime, 'run', attack='impersonation', rounds=1000, output='csv')
        self.assertEqual(exit_code, EXIT_DETECTED)
        header, row = output.splitlines()
        self.assertTrue(header.startswith('variant,strategy,'))
        self.assertTrue(row.startswith('modified,00/first,1000,'))
        self.assertTrue(row.endswith(',true'))

    def test_run_transcript(self):
        runtime = Runtime(self.config_path)
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = pathlib.Path(tmp_dir, 'session.jsonl')
            exit_code, _ = self.execute(runtime, 'run', rounds=50, transcript=str(path))
            self.assertEqual(exit_code, EXIT_OK)
            self.assertEqual(len(path.read_text(encoding='utf-8').splitlines()), 4 * 50 + 2)
            exit_code, output = self.execute(runtime, 'replay', path=path)
        self.assertEqual(exit_code, EXIT_OK)
        self.assertEqual(json.loads(output), {'messages': 202, 'rounds': 50, 'verified': True})

    def test_replay_example(self):
        runtime = Runtime(self.config_path)
        exit_code, output = self.execute(runtime, 'replay', path=TEST_TRANSCRIPT_PATH)
        self.assertEqual(exit_code, EXIT_OK)
        self.assertEqual(json.loads(output)['rounds'], 2)

    def test_oracle(self):
        runtime = Runtime(self.config_path)
        exit_code, output = self.execute(runtime, 'oracle', output_format='json')
        self.assertEqual(exit_code, EXIT_OK)
        rows = json.loads(output)
        self.assertIn({'variant': 'modified', 'eve_shuffle': '00', 'eve_pulse': 'first',
                       'exact_qber': '1/4'}, rows)
        self.assertIn({'variant': 'original', 'eve_shuffle': 'mimic', 'eve_pulse': 'random',
                       'exact_qber': '0'}, rows)
        _, table = self.execute(runtime, 'oracle')
        self.assertEqual(len(table.splitlines()), len(rows) + 1)
        _, text = self.execute(runtime, 'oracle', output_format='csv')
        self.assertEqual(text.splitlines()[0], 'variant,eve_shuffle,eve_pulse,exact_qber')
        self.assertEqual([dict(row) for row in csv.DictReader(io.StringIO(text))], rows)

    def test_amplitude_check(self):
        runtime = Runtime(self.config_path)
        exit_code, output = self.execute(
            runtime, 'amplitude-check', alpha=(1.0, 0.0), beta=(1.0, 0.0), trials=1000, checks=5,
            seed=0)
        self.assertEqual(exit_code, EXIT_OK)
        result = json.loads(output)
        self.assertEqual(result['click_frequency'], 0.0)
        self.assertEqual(result['detection_probability'], 0.0)
        with self.assertRaises(ValueError):
            self.execute(runtime, 'amplitude-check', alpha=(1.0, 0.0), beta=(0.0, 0.0),
                         trials=0, checks=1, seed=0)
