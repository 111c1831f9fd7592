"""
Tests for the management commands of the decomposition app.
"""
import csv
import json
import shutil
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from ..catalog import default_rule_dir
from ..models import RunRecord


class CommandTestCase(TestCase):
    """Shared helpers for command tests."""

    def setUp(self):
        """Set up test data."""
        self.tmp = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, self.tmp, ignore_errors=True)

    def call(self, name, *args):
        out = StringIO()
        call_command(name, *args, stdout=out)
        return out.getvalue()

    def assertExitCode(self, code, name, *args):
        with self.assertRaises(CommandError) as ctx:
            self.call(name, *args)
        self.assertEqual(ctx.exception.returncode, code)


class VerifyCatalogCommandTest(CommandTestCase):
    """Tests for the verify_catalog command."""

    def test_shipped_catalog(self):
        """Test that the shipped rules all verify."""
        output = self.call('verify_catalog')
        self.assertIn('All 18 rules verified', output)
        self.assertIn('elementary_z', output)
        self.assertIn('dynamic_5', output)
        self.assertIn('star_state_5_0', output)

    def test_corrupted_catalog(self):
        """Test that a rule with a wrong coefficient exits with status 4."""
        source = default_rule_dir() / 'star_state_3_0.zxr'
        text = source.read_text().replace('BRANCH 3 0 0 0 0', 'BRANCH 4 0 0 0 0')
        (self.tmp / 'star_state_3_0.zxr').write_text(text)
        self.assertExitCode(4, 'verify_catalog', '--rules', str(self.tmp))


class GenCommandTest(CommandTestCase):
    """Tests for the gen command."""

    def test_byte_identical_output(self):
        """Test that equal arguments write equal files."""
        args = ['--qubits', '6', '--nots', '3', '--cnots', '3', '--mcts', '2', '--seed', '9']
        self.call('gen', *args, '--out', str(self.tmp / 'a.json'))
        self.call('gen', *args, '--out', str(self.tmp / 'b.json'))
        first = (self.tmp / 'a.json').read_bytes()
        self.assertEqual(first, (self.tmp / 'b.json').read_bytes())
        self.assertEqual(json.loads(first)['qubits'], 6)

    def test_too_few_qubits(self):
        """Test that an invalid circuit request exits with status 1."""
        self.assertExitCode(1, 'gen', '--qubits', '2', '--out', str(self.tmp / 'c.json'))


class RunCommandTest(CommandTestCase):
    """Tests for the run command."""

    def test_run_fixture(self):
        """Test the outputs of a run on the 3-qubit search fixture."""
        output = self.call('run', '--circuit', 'grover_3q_101', '--out', str(self.tmp))
        self.assertIn('101 *', output)
        peaks = json.loads((self.tmp / 'peaks.json').read_text())
        self.assertEqual([p['bitstring'] for p in peaks['peaks']], ['101'])
        self.assertAlmostEqual(peaks['peaks'][0]['prob'], 25 / 32)
        with (self.tmp / 'statevector.csv').open() as handle:
            rows = list(csv.DictReader(handle))
        self.assertEqual(len(rows), 8)
        self.assertEqual(rows[5]['bitstring'], '101')
        self.assertIn('terminal_terms:', (self.tmp / 'terms.txt').read_text())

    def test_emit_subset(self):
        """Test that --emit limits the files written."""
        self.call('run', '--circuit', 'grover_3q_101', '--out', str(self.tmp), '--emit', 'peaks')
        self.assertTrue((self.tmp / 'peaks.json').exists())
        self.assertFalse((self.tmp / 'statevector.csv').exists())

    def test_bad_emit(self):
        """Test that an unknown --emit value exits with status 2."""
        self.assertExitCode(2, 'run', '--circuit', 'grover_3q_101', '--emit', 'pictures')

    def test_unknown_fixture(self):
        """Test that a missing circuit exits with status 3."""
        self.assertExitCode(3, 'run', '--circuit', 'no_such_circuit')

    def test_record(self):
        """Test that --record stores a finished RunRecord."""
        self.call('run', '--circuit', 'grover_3q_101', '--diffusion', 'auto', '--record')
        record = RunRecord.objects.get()
        self.assertEqual(record.status, 'finished')
        self.assertEqual(record.peaks, [5])

    def test_jobs(self):
        """Test that a worker pool gives the same peaks and that --jobs 0 exits with status 2."""
        self.call('run', '--circuit', 'grover_3q_101', '--out', str(self.tmp), '--jobs', '2', '--emit', 'peaks')
        peaks = json.loads((self.tmp / 'peaks.json').read_text())
        self.assertEqual([p['bitstring'] for p in peaks['peaks']], ['101'])
        self.assertExitCode(2, 'run', '--circuit', 'grover_3q_101', '--jobs', '0')


class DiscoverCommandTest(CommandTestCase):
    """Tests for the discover command."""

    def test_one_leg_certificate(self):
        """Test that a 2-term one-leg search writes a certificate."""
        path = self.tmp / 'found.zxr'
        output = self.call('discover', '--target', '1:0', '--terms', '2', '--out', str(path))
        self.assertIn('found 2 terms', output)
        self.assertIn('TERMS 2', path.read_text())

    def test_bad_target(self):
        """Test that malformed and too-wide targets exit with status 2."""
        self.assertExitCode(2, 'discover', '--target', 'three', '--terms', '2')
        self.assertExitCode(2, 'discover', '--target', '4:0', '--terms', '2')


class BenchCommandTest(CommandTestCase):
    """Tests for the bench command."""

    def test_tiny_grid(self):
        """Test that a one-cell grid writes its CSV and report."""
        config = self.tmp / 'bench.yaml'
        config.write_text('qubits: [3]\nnots: [1]\ncnots: [1]\nmcts: [1]\nsamples: 1\ntimeout: 60\n')
        out = self.tmp / 'out'
        output = self.call('bench', '--config', str(config), '--out', str(out), '--jobs', '1')
        self.assertIn('2 attempts', output)
        report = json.loads((out / 'aggregate.json').read_text())
        self.assertEqual(len(report), 1)
        self.assertEqual(report[0]['attempts'], 2)
        self.assertEqual(len((out / 'bench.csv').read_text().splitlines()), 3)

    def test_missing_config(self):
        """Test that a missing config file exits with status 3."""
        self.assertExitCode(3, 'bench', '--config', str(self.tmp / 'none.yaml'), '--out', str(self.tmp))
