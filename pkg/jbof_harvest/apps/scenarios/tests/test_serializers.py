"""
Tests for scenario validation.
"""
import ddt
import pytest
from django.test import SimpleTestCase

from jbof_harvest.apps.core.constants import Variant
from jbof_harvest.apps.ssd.data import SsdConfig
from test_utils.utils import TempDirMixin, scenario_document

from ..api import effective_config, validate_document
from ..constants import DEFAULT_DURATION_MS, FailureKind
from ..exceptions import ScenarioConfigError
from ..serializers import evolve_config, flatten_errors


def errors_of(document):
    with pytest.raises(ScenarioConfigError) as raised:
        validate_document(document)
    return raised.value.errors


@ddt.ddt
class ScenarioSerializerTests(TempDirMixin, SimpleTestCase):
    """
    Tests for ``ScenarioSerializer`` through ``validate_document``.
    """

    def test_empty_document_resolves_every_default(self):
        scenario = validate_document({})
        assert scenario['variant'] == Variant.XBOF
        assert scenario['ssd_count'] == 12
        assert scenario['seed'] == 0
        assert scenario['duration_ms'] == DEFAULT_DURATION_MS
        assert scenario['hardware']['ssd'] == SsdConfig()
        assert scenario['workloads'] == []
        assert scenario['failures'] == []

    def test_hardware_overrides_are_nested(self):
        scenario = validate_document({'hardware': {'ssd': {'geometry': {'channels': 4}, 'prefill': 0.25}}})
        ssd = scenario['hardware']['ssd']
        assert ssd.geometry.channels == 4
        assert ssd.geometry.dies_per_channel == SsdConfig().geometry.dies_per_channel
        assert ssd.prefill == 0.25

    @ddt.data(
        ({'hardware': {'ssd': {'geometry': {'lanes': 4}}}}, 'hardware.ssd'),
        ({'hardware': {'ssd': {'prefill': 2.0}}}, 'hardware.ssd'),
        ({'hardware': {'host': {'core_count': 'many'}}}, 'hardware.host'),
        ({'ssd_count': 0}, 'ssd_count'),
        ({'variant': 'raid'}, 'variant'),
        ({'duration_ms': -1}, 'duration_ms'),
    )
    @ddt.unpack
    def test_field_level_errors(self, document, path):
        assert path in errors_of(document)

    def test_devices_must_exist(self):
        errors = errors_of(scenario_document(
            workloads=[{'mode': 'microbench', 'devices': ['ssd0', 'ssd2']}],
            failures=[{'device': 'ssd5', 'at_ms': 1}],
        ))
        assert set(errors) == {'workloads.0.devices.1', 'failures.0.device'}
        assert 'ssd2' in errors['workloads.0.devices.1']

    def test_per_device_overrides(self):
        hardware = {'ssd': {'compute': {'core_count': 4}}, 'devices': {'ssd1': {'compute': {'core_count': 2}}}}
        scenario = validate_document(scenario_document(hardware=hardware))
        devices = scenario['hardware']['devices']
        assert devices['ssd1'].compute.core_count == 2
        assert scenario['hardware']['ssd'].compute.core_count == 4
        assert 'hardware.devices.ssd7' in errors_of(scenario_document(hardware={'devices': {'ssd7': {}}}))

    @ddt.data(
        ('ssd0-ssd3', ['ssd0', 'ssd1', 'ssd2', 'ssd3']),
        ('ssd2', ['ssd2']),
        ('all', ['ssd0', 'ssd1', 'ssd2', 'ssd3', 'ssd4']),
        (['ssd4', 'ssd1'], ['ssd4', 'ssd1']),
    )
    @ddt.unpack
    def test_device_selectors(self, devices, expected):
        scenario = validate_document({'ssd_count': 5, 'workloads': [{'mode': 'microbench', 'devices': devices}]})
        assert scenario['workloads'][0]['devices'] == expected

    def test_empty_device_range(self):
        assert 'workloads.0.devices' in errors_of({'workloads': [{'mode': 'microbench', 'devices': 'ssd3-ssd1'}]})

    @ddt.data(
        ({'mode': 'microbench', 'devices': []}, 'devices'),
        ({'mode': 'microbench', 'devices': 'ssd0', 'size_kb': 6}, 'size_kb'),
        ({'mode': 'profile', 'devices': 'ssd0'}, 'profile'),
        ({'mode': 'profile', 'devices': 'ssd0', 'profile': 'nope'}, 'profile'),
        ({'mode': 'profile', 'devices': 'ssd0', 'profile': 'src', 'profile_overrides': {'read_ratio': 3}},
         'profile_overrides'),
        ({'mode': 'trace'}, 'path'),
        ({'mode': 'trace', 'path': '/nonexistent/trace.csv'}, 'path'),
        ({'mode': 'microbench', 'devices': 'ssd0', 'start_ms': 5, 'stop_ms': 2}, 'stop_ms'),
        ({'mode': 'microbench', 'devices': 'ssd0', 'iodepth': 0}, 'iodepth'),
    )
    @ddt.unpack
    def test_workload_errors(self, workload, field):
        assert f'workloads.0.{field}' in errors_of({'workloads': [workload]})

    def test_workload_names_are_unique(self):
        workloads = [{'name': 'a', 'mode': 'microbench', 'devices': 'ssd0'}] * 2
        assert 'workloads.1.name' in errors_of({'workloads': workloads})

    def test_borrower_failure_needs_a_workload_on_the_device(self):
        document = scenario_document(failures=[{'device': 'ssd1', 'at_ms': 1, 'kind': FailureKind.BORROWER}])
        document['workloads'][0]['devices'] = ['ssd0']
        assert 'failures.0.kind' in errors_of(document)
        document['failures'][0]['kind'] = FailureKind.LENDER
        assert validate_document(document)['failures'][0]['kind'] == FailureKind.LENDER

    def test_failures_must_fall_inside_the_run(self):
        document = scenario_document(failures=[{'device': 'ssd0', 'at_ms': 5}])
        assert 'failures.0.at_ms' in errors_of(document)

    def test_trace_runs_need_no_duration(self):
        path = f'{self.tmp_dir}/trace.csv'
        with open(path, 'w', encoding='utf-8') as stream:
            stream.write('timestamp_us,device_id,op,offset,size\n1,ssd0,R,0,4096\n')
        scenario = validate_document({'workloads': [{'mode': 'trace', 'path': path}]})
        assert scenario['duration_ms'] is None

    def test_effective_config_validates_to_itself(self):
        document = scenario_document(
            hardware={'devices': {'ssd1': {'prefill': 0.1}}},
            failures=[{'device': 'ssd1', 'at_ms': 2}],
        )
        config = effective_config(validate_document(document))
        assert 'output' not in config
        assert config['hardware']['devices']['ssd1']['prefill'] == 0.1
        assert effective_config(validate_document(config)) == config


class HelperTests(SimpleTestCase):
    """
    Tests for the serializer helpers.
    """

    def test_evolve_config_rejects_unknown_fields(self):
        with pytest.raises(ValueError, match='unknown field geometry.lanes'):
            evolve_config(SsdConfig(), {'geometry': {'lanes': 2}})

    def test_flatten_errors(self):
        detail = {'workloads': [{}, {'devices': ['bad']}], 'seed': ['too small', 'not even']}
        assert dict(flatten_errors(detail)) == {
            'workloads.1.devices': 'bad',
            'seed': 'too small; not even',
        }
