"""
Tests for running scenarios.
"""
import json
import os
from unittest import mock

import pytest
from django.test import TestCase

from jbof_harvest.apps.core.constants import MS, Variant
from jbof_harvest.apps.core.exceptions import InvariantViolation
from jbof_harvest.apps.workload.constants import TraceOp
from jbof_harvest.apps.workload.data import TraceRecord
from jbof_harvest.apps.workload.traces import write_trace
from test_utils.utils import TempDirMixin, scenario_document

from ..api import validate_document
from ..constants import REPORT_FILE, SUMMARY_FILE, TRACE_DRAIN_NS, TRACE_FILE, FailureKind, RunStatus
from ..models import SimulationRun
from ..runner import execute, run_sweep, simulate


def read_bytes(path):
    with open(path, 'rb') as stream:
        return stream.read()


class SimulateTests(TempDirMixin, TestCase):
    """
    Tests for ``simulate``.
    """

    def run_scenario(self, out='run', **changes):
        return simulate(validate_document(scenario_document(**changes)), output_dir=os.path.join(self.tmp_dir, out))

    def test_writes_both_reports(self):
        outcome = self.run_scenario()
        assert os.path.isfile(outcome.report_path)
        assert os.path.isfile(outcome.summary_path)
        assert os.path.basename(outcome.report_path) == REPORT_FILE
        assert os.path.basename(outcome.summary_path) == SUMMARY_FILE
        assert not os.path.exists(os.path.join(outcome.output_dir, TRACE_FILE))
        report = outcome.report
        assert report['variant'] == Variant.CONV
        assert report['duration_ns'] == 5 * MS
        assert report['aggregate']['completed'] > 0
        assert report['aggregate']['errors'] == 0
        assert [driver['driver'] for driver in report['drivers']] == ['reads.ssd0', 'reads.ssd1']
        assert outcome.summary['completed'] == report['aggregate']['completed']

    def test_same_seed_same_bytes(self):
        first = self.run_scenario(out='a')
        second = self.run_scenario(out='b')
        assert read_bytes(first.report_path) == read_bytes(second.report_path)
        assert read_bytes(first.summary_path) == read_bytes(second.summary_path)
        third = self.run_scenario(out='c', seed=8)
        assert read_bytes(first.report_path) != read_bytes(third.report_path)

    def test_embedded_config_reproduces_the_report(self):
        first = self.run_scenario(
            out='a', variant=Variant.XBOF, failures=[{'device': 'ssd1', 'at_ms': 3}],
        )
        with open(first.report_path, encoding='utf-8') as stream:
            config = json.load(stream)['config']
        again = simulate(validate_document(config), output_dir=os.path.join(self.tmp_dir, 'again'))
        assert read_bytes(first.report_path) == read_bytes(again.report_path)

    def test_failures_are_injected_and_reported(self):
        outcome = self.run_scenario(failures=[{'device': 'ssd1', 'at_ms': 1, 'kind': FailureKind.BORROWER}])
        assert outcome.report['failures'] == [{'device': 'ssd1', 'kind': FailureKind.BORROWER, 'time_ns': 1 * MS}]
        assert outcome.report['devices']['ssd1']['failed'] is True
        assert 'ssd1' in outcome.report['host']['failed_devices']
        assert outcome.report['devices']['ssd0']['workload']['errors'] == 0

    def test_event_trace(self):
        outcome = self.run_scenario(event_trace=True)
        with open(os.path.join(outcome.output_dir, TRACE_FILE), encoding='utf-8') as stream:
            lines = stream.readlines()
        assert len(lines) == outcome.report['dispatch']['dispatched']
        time, target, kind = lines[0].split()
        assert int(time) >= 0 and target and kind

    def test_trace_runs_end_after_their_last_record(self):
        path = os.path.join(self.tmp_dir, 'trace.csv')
        records = [
            TraceRecord(timestamp_us=index * 100, device='d0', op=TraceOp.WRITE, offset=index * 8192, size=8192)
            for index in range(30)
        ]
        write_trace(path, records)
        outcome = self.run_scenario(
            duration_ms=None,
            workloads=[{'name': 'replay', 'mode': 'trace', 'path': path, 'device_map': {'d0': 'ssd1'}}],
        )
        assert outcome.report['duration_ns'] == records[-1].timestamp_ns + TRACE_DRAIN_NS
        assert outcome.report['devices']['ssd1']['workload']['writes'] == 30
        assert outcome.report['drivers'][0]['completed'] == 30

    def test_profile_workloads(self):
        outcome = self.run_scenario(workloads=[
            {'mode': 'profile', 'devices': 'ssd0', 'profile': 'MSNFS', 'iodepth': 4,
             'profile_overrides': {'footprint': 8 * 1024 * 1024}},
        ])
        stats = outcome.report['drivers'][0]
        assert stats['kind'] == 'profile'
        assert stats['read_bytes'] > 0 and stats['write_bytes'] > 0


class ExecuteTests(TempDirMixin, TestCase):
    """
    Tests for ``execute`` and ``run_sweep``, which keep ``SimulationRun`` records.
    """

    def scenario(self, **changes):
        changes.setdefault('output', os.path.join(self.tmp_dir, 'out'))
        return validate_document(scenario_document(**changes))

    def test_successful_run_is_recorded(self):
        run, outcome = execute(self.scenario())
        run.refresh_from_db()
        assert run.status == RunStatus.SUCCEEDED
        assert run.summary == outcome.summary
        assert run.output_dir == outcome.output_dir
        assert run.config['seed'] == 7
        assert 'output' not in run.config

    def test_invariant_violation_fails_the_run(self):
        with mock.patch('jbof_harvest.apps.scenarios.runner.simulate', side_effect=InvariantViolation('broken')):
            with pytest.raises(InvariantViolation):
                execute(self.scenario())
        run = SimulationRun.objects.get()
        assert run.status == RunStatus.FAILED
        assert run.error == 'broken'

    def test_sweep_records_every_point(self):
        scenarios = [self.scenario(name=f'p{seed}', seed=seed, output=os.path.join(self.tmp_dir, str(seed)))
                     for seed in (1, 2)]
        outcome = simulate(scenarios[1])
        effects = [InvariantViolation('broken'), outcome]
        with mock.patch('jbof_harvest.apps.scenarios.runner.simulate', side_effect=effects):
            runs = run_sweep(scenarios, processes=1)
        assert [run.name for run in runs] == ['p1', 'p2']
        assert [run.status for run in runs] == [RunStatus.FAILED, RunStatus.SUCCEEDED]
        assert 'InvariantViolation' in runs[0].error
        assert SimulationRun.objects.count() == 2
