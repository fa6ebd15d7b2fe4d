"""
Tests for the scenarios management commands.
"""
import os
from io import StringIO

import ddt
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase
from pytest import mark, raises

from jbof_harvest.apps.core.constants import Variant
from test_utils.utils import TempDirMixin, scenario_document

from ..constants import RunStatus
from ..models import SimulationRun


@mark.django_db
@ddt.ddt
class TestScenarioManagementCommands(TempDirMixin, TestCase):
    """
    Test the run_scenario, validate_scenario and sweep_scenarios commands.
    """

    def call(self, *args):
        stdout, stderr = StringIO(), StringIO()
        call_command(*args, stdout=stdout, stderr=stderr)
        return stdout.getvalue(), stderr.getvalue()

    def test_run_scenario_writes_reports_and_records_the_run(self):
        config = self.write_yaml('s.yaml', scenario_document())
        out = os.path.join(self.tmp_dir, 'out')
        stdout, _ = self.call('run_scenario', '--config', config, '--out', out, '--variant', Variant.XBOF,
                              '--seed', '3', '--duration', '4ms', '--set', 'workloads.0.iodepth=2')
        assert os.path.join(out, 'report.json') in stdout
        assert os.path.isfile(os.path.join(out, 'summary.csv'))
        run = SimulationRun.objects.get()
        assert (run.variant, run.seed, run.status) == (Variant.XBOF, 3, RunStatus.SUCCEEDED)
        assert run.config['duration_ms'] == 4.0
        assert run.config['workloads'][0]['iodepth'] == 2

    def test_event_trace_flag(self):
        config = self.write_yaml('s.yaml', scenario_document())
        out = os.path.join(self.tmp_dir, 'out')
        self.call('run_scenario', '--config', config, '--out', out, '--event-trace')
        assert os.path.getsize(os.path.join(out, 'events.log')) > 0

    def test_invalid_scenario_names_the_field(self):
        config = self.write_yaml('bad.yaml', scenario_document(ssd_count=0))
        stderr = StringIO()
        with raises(CommandError):
            call_command('run_scenario', '--config', config, stderr=stderr)
        assert 'ssd_count:' in stderr.getvalue()
        assert not SimulationRun.objects.exists()

    @ddt.data('micro-read-64k', 'cores-ratio', 'lender-failure')
    def test_validate_presets(self, preset):
        stdout, stderr = self.call('validate_scenario', '--config', preset)
        assert 'valid' in stdout
        assert stderr == ''

    def test_validate_reports_every_bad_point(self):
        document = scenario_document(sweep={'ssd_count': [0, 1, 2]})
        config = self.write_yaml('sweep.yaml', document)
        stderr = StringIO()
        with raises(CommandError):
            call_command('validate_scenario', '--config', config, stderr=stderr)
        # ssd_count 0 fails on its own; ssd_count 1 leaves ssd1 unknown.
        assert 'test[ssd_count=0] ssd_count:' in stderr.getvalue()
        assert 'test[ssd_count=1] workloads.0.devices.1:' in stderr.getvalue()

    def test_validate_prints_the_effective_config(self):
        config = self.write_yaml('s.yaml', scenario_document())
        stdout, _ = self.call('validate_scenario', '--config', config, '--print')
        assert '"vh_staging_pages": 1024' in stdout

    def test_sweep_runs_every_point(self):
        document = scenario_document(sweep={'seed': [1, 2]})
        config = self.write_yaml('sweep.yaml', document)
        out = os.path.join(self.tmp_dir, 'grid')
        stdout, _ = self.call('sweep_scenarios', '--preset', config, '--out', out, '--processes', '1')
        runs = SimulationRun.objects.order_by('seed')
        assert [(run.seed, run.status) for run in runs] == [(1, RunStatus.SUCCEEDED), (2, RunStatus.SUCCEEDED)]
        assert os.path.isfile(os.path.join(out, 'seed-1', 'report.json'))
        assert stdout.count(RunStatus.SUCCEEDED) == 2
