import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from simulations.models import ExperimentRun
from simulations.serializers import ExperimentRunSerializer
from simulations.tests.factories import ExperimentRunFactory

TINY_DESIGN = """\
DESIGN_ID=tinyrun
K=2
P=2
SIZES=30
FAMILIES=frank
TAUS=0.4
N_REPLICATIONS=3
SEED=5
ALPHA=1
"""


class ExperimentRunTestCase(TestCase):
    """Test cases for ExperimentRun model."""

    def setUp(self):
        self.run = ExperimentRunFactory(design_id='alt1', seed=7)

    def test_str(self):
        """Test the run string form."""
        self.assertEqual(str(self.run), 'alt1 seed=7 (pending)')

    def test_mark_completed(self):
        """Test completing a run."""
        self.run.mark_running()
        self.run.mark_completed({'rows': [{'n': '50'}, {'n': '100'}]}, 3.5)
        self.run.refresh_from_db()
        self.assertEqual(self.run.status, 'completed')
        self.assertEqual(self.run.runtime_seconds, 3.5)
        self.assertIsNotNone(self.run.completed_at)
        self.assertEqual(ExperimentRunSerializer(self.run).data['n_cells'], 2)

    def test_mark_failed(self):
        """Test failing a run."""
        self.run.mark_failed(ValueError('boom'))
        self.run.refresh_from_db()
        self.assertEqual(self.run.status, 'failed')
        self.assertEqual(self.run.error_message, 'boom')


class SimulateCommandTestCase(TestCase):
    """Test cases for the copula_simulate and list_experiments commands."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.design = Path(self.tmp.name) / 'tinyrun.env'
        self.design.write_text(TINY_DESIGN)

    def simulate(self, *args):
        out, err = StringIO(), StringIO()
        call_command('copula_simulate', str(self.design), *args, stdout=out, stderr=err)
        return out.getvalue(), err.getvalue()

    def test_json_report(self):
        """Test the JSON simulation report."""
        out, _ = self.simulate()
        data = json.loads(out)
        self.assertEqual(data['design_id'], 'tinyrun')
        self.assertEqual(data['rows'][0]['replications'], 3)
        self.assertNotIn('runtime_seconds', data)

    def test_timing(self):
        """Test the report with timing."""
        out, _ = self.simulate('--timing')
        self.assertIn('runtime_seconds', json.loads(out))

    def test_overrides(self):
        """Test replication and seed overrides."""
        out, _ = self.simulate('--replications', '2', '--seed', '6', '--format', 'csv')
        lines = out.strip().splitlines()
        self.assertEqual(len(lines), 2)
        self.assertIn(',2,', lines[1])

    def test_same_seed_same_bytes(self):
        """Test equal seeds give identical output."""
        self.assertEqual(self.simulate('--format', 'csv')[0], self.simulate('--format', 'csv', '--batch-size', '1')[0])

    def test_save(self):
        """Test saving the run."""
        _, err = self.simulate('--save')
        self.assertIn('Saved run', err)
        run = ExperimentRun.objects.get()
        self.assertEqual(run.status, 'completed')
        self.assertEqual(run.design_id, 'tinyrun')
        self.assertEqual(len(run.report['rows']), 1)
        self.assertIn('runtime_seconds', run.report)

    def test_ten_sample_null_design(self):
        """Shipped ten-sample null designs run by id: six sizes times three taus."""
        out = StringIO()
        call_command(
            'copula_simulate', 'null10_gaussian', '--replications', '1', '--alpha', '1', '--format', 'csv',
            stdout=out, stderr=StringIO(),
        )
        lines = out.getvalue().strip().splitlines()
        self.assertEqual(len(lines), 19)
        self.assertTrue(all(line.startswith('null10_gaussian,') for line in lines[1:]))

    def test_unknown_design(self):
        """Test an unknown design is a usage error."""
        with self.assertRaises(CommandError) as cm:
            call_command('copula_simulate', 'nosuchdesign', stdout=StringIO(), stderr=StringIO())
        self.assertEqual(cm.exception.returncode, 1)

    def test_bad_batch_size(self):
        """Test a zero batch size is rejected."""
        with self.assertRaises(CommandError) as cm:
            self.simulate('--batch-size', '0')
        self.assertEqual(cm.exception.returncode, 1)

    def test_list_experiments(self):
        """Test listing designs and saved runs."""
        self.simulate('--save')
        out = StringIO()
        call_command('list_experiments', stdout=out)
        self.assertIn('Design: tinyrun (test)', out.getvalue())
        self.assertIn('alt1', out.getvalue())
        self.assertIn('null10_joe', out.getvalue())

        out = StringIO()
        call_command('list_experiments', '--json', '--status', 'completed', stdout=out)
        self.assertEqual(json.loads(out.getvalue())[0]['n_cells'], 1)
