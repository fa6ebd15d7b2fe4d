"""
Serializers for scenario documents.

A scenario is a YAML mapping. ``ScenarioSerializer`` validates it and resolves
every default; rendering its ``validated_data`` back through the serializer gives
the effective configuration that reports embed and that reproduces the run.
"""
import os
import re

import attr
from rest_framework import serializers

from jbof_harvest.apps.core.constants import Variant
from jbof_harvest.apps.fabric.data import FabricConfig
from jbof_harvest.apps.harvest.data import HarvestPolicy
from jbof_harvest.apps.host.data import HostConfig
from jbof_harvest.apps.ssd.constants import Opcode
from jbof_harvest.apps.ssd.data import SsdConfig
from jbof_harvest.apps.workload.constants import DEFAULT_IODEPTH, MicrobenchKind
from jbof_harvest.apps.workload.exceptions import UnknownProfileError
from jbof_harvest.apps.workload.profiles import get_profile

from .constants import DEFAULT_DURATION_MS, DEFAULT_SSD_COUNT, FailureKind, WorkloadMode

ALL_DEVICES = 'all'
DEVICE_RANGE = re.compile(r'^ssd(\d+)-ssd(\d+)$')


def evolve_config(config, overrides, path=''):
    """
    Copy of the attrs instance ``config`` with ``overrides`` applied. Nested
    configuration objects take nested mappings.
    """
    if not isinstance(overrides, dict):
        raise ValueError(f'{path.rstrip(".") or "configuration"} must be a mapping')
    fields = attr.fields_dict(type(config))
    changes = {}
    for key, value in overrides.items():
        if key not in fields:
            raise ValueError(f'unknown field {path}{key}')
        current = getattr(config, key)
        if attr.has(type(current)) and isinstance(value, dict):
            value = evolve_config(current, value, f'{path}{key}.')
        changes[key] = value
    try:
        return attr.evolve(config, **changes)
    except TypeError as exc:
        raise ValueError(str(exc)) from exc


def config_as_dict(config):
    return attr.asdict(config, retain_collection_types=False)


def flatten_errors(detail, prefix=''):
    """
    Yield (dotted path, message) pairs out of a DRF error structure.
    """
    if isinstance(detail, dict):
        for key, value in detail.items():
            yield from flatten_errors(value, f'{prefix}{key}.')
    elif isinstance(detail, list) and all(isinstance(item, str) for item in detail):
        yield prefix.rstrip('.') or 'non_field_errors', '; '.join(str(item) for item in detail)
    elif isinstance(detail, list):
        for index, item in enumerate(detail):
            if item:
                yield from flatten_errors(item, f'{prefix}{index}.')
    else:
        yield prefix.rstrip('.') or 'non_field_errors', str(detail)


class ConfigField(serializers.Field):
    """
    Field overrides on top of the defaults of an attrs configuration class.

    Validates to the configured instance and renders back as the complete
    mapping, defaults included.
    """

    def __init__(self, config_class, **kwargs):
        self.config_class = config_class
        kwargs.setdefault('default', config_class)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        if isinstance(data, self.config_class):
            return data
        try:
            return evolve_config(self.config_class(), data)
        except ValueError as exc:
            raise serializers.ValidationError(str(exc)) from exc

    def to_representation(self, value):
        return config_as_dict(value)


class DeviceConfigsField(serializers.DictField):
    """
    Per-SSD overrides keyed by SSD id. ``HardwareSerializer`` resolves them
    into complete ``SsdConfig`` objects.
    """
    child = serializers.DictField()

    def to_representation(self, value):
        return {
            device_id: config_as_dict(config) if attr.has(type(config)) else config
            for device_id, config in sorted(value.items())
        }


class DeviceListField(serializers.ListField):
    """
    SSD ids, given as a list, a single id, a range such as ``ssd0-ssd5`` or
    ``all``. ``ScenarioSerializer`` expands ``all`` once the SSD count is known.
    """
    child = serializers.CharField()

    def to_internal_value(self, data):
        if isinstance(data, str):
            match = DEVICE_RANGE.match(data.strip())
            if match:
                first, last = int(match.group(1)), int(match.group(2))
                if first > last:
                    raise serializers.ValidationError(f'empty device range {data!r}')
                data = [f'ssd{index}' for index in range(first, last + 1)]
            else:
                data = [data.strip()]
        return super().to_internal_value(data)


class HardwareSerializer(serializers.Serializer):
    """
    Hardware of the simulated JBOF.
    """
    ssd = ConfigField(SsdConfig, help_text='Overrides of the SSD configuration shared by every SSD.')
    host = ConfigField(HostConfig, help_text='Overrides of the JBOF host and its NVMe driver.')
    fabric = ConfigField(FabricConfig, help_text='Overrides of the CXL fabric.')
    policy = ConfigField(HarvestPolicy, help_text='Overrides of the harvesting policy.')
    devices = DeviceConfigsField(
        default=dict,
        help_text='Per-SSD overrides applied on top of `ssd`, keyed by SSD id.',
    )

    def validate(self, attrs):
        base = attrs['ssd']
        resolved = {}
        errors = {}
        for device_id, overrides in attrs['devices'].items():
            if isinstance(overrides, SsdConfig):
                resolved[device_id] = overrides
                continue
            try:
                resolved[device_id] = evolve_config(base, overrides)
            except ValueError as exc:
                errors[device_id] = [str(exc)]
        if errors:
            raise serializers.ValidationError({'devices': errors})
        attrs['devices'] = resolved
        return attrs


class WorkloadSerializer(serializers.Serializer):
    """
    One workload entry: a microbenchmark or a profile run closed-loop on each of
    its SSDs, or the open-loop replay of a trace file.
    """
    name = serializers.CharField(default='', allow_blank=True, help_text='Driver name prefix.')
    mode = serializers.ChoiceField(choices=WorkloadMode.ALL)
    devices = DeviceListField(default=list, help_text='SSDs the closed-loop drivers run on.')
    pattern = serializers.ChoiceField(choices=MicrobenchKind.ALL, default=MicrobenchKind.RANDOM)
    op = serializers.ChoiceField(choices=Opcode.ALL, default=Opcode.READ)
    size_kb = serializers.IntegerField(min_value=4, default=4, help_text='Microbenchmark request size.')
    iodepth = serializers.IntegerField(min_value=1, default=DEFAULT_IODEPTH)
    profile = serializers.CharField(allow_null=True, default=None, help_text='Name of a predefined profile.')
    profile_overrides = serializers.DictField(default=dict, help_text='Profile fields to change, e.g. footprint.')
    path = serializers.CharField(allow_null=True, default=None, help_text='Trace file to replay.')
    device_map = serializers.DictField(
        child=serializers.CharField(), default=dict, help_text='Trace device ids renamed to SSD ids.',
    )
    start_ms = serializers.FloatField(min_value=0, default=0.0)
    stop_ms = serializers.FloatField(min_value=0, allow_null=True, default=None)

    def validate(self, attrs):
        mode = attrs['mode']
        errors = {}
        if mode in (WorkloadMode.MICROBENCH, WorkloadMode.PROFILE) and not attrs['devices']:
            errors['devices'] = ['a closed-loop workload needs at least one SSD']
        if mode == WorkloadMode.MICROBENCH and attrs['size_kb'] % 4:
            errors['size_kb'] = ['must be a multiple of 4']
        if mode == WorkloadMode.PROFILE:
            if not attrs['profile']:
                errors['profile'] = ['a profile workload needs a profile name']
            else:
                try:
                    get_profile(attrs['profile'], **attrs['profile_overrides'])
                except UnknownProfileError:
                    errors['profile'] = [f'unknown profile {attrs["profile"]!r}']
                except (TypeError, ValueError) as exc:
                    errors['profile_overrides'] = [str(exc)]
        if mode == WorkloadMode.TRACE and not attrs['path']:
            errors['path'] = ['a trace workload needs a trace file']
        elif mode == WorkloadMode.TRACE and not os.path.isfile(attrs['path']):
            errors['path'] = [f'no trace file {attrs["path"]!r}']
        if attrs['stop_ms'] is not None and attrs['stop_ms'] <= attrs['start_ms']:
            errors['stop_ms'] = ['must be after start_ms']
        if errors:
            raise serializers.ValidationError(errors)
        return attrs


class FailureSerializer(serializers.Serializer):
    """
    An SSD failing at a simulated time.
    """
    device = serializers.CharField()
    at_ms = serializers.FloatField(min_value=0)
    kind = serializers.ChoiceField(choices=FailureKind.ALL, default=FailureKind.LENDER)


class ScenarioSerializer(serializers.Serializer):
    """
    A complete scenario document.
    """
    name = serializers.CharField(default='', allow_blank=True)
    description = serializers.CharField(default='', allow_blank=True)
    variant = serializers.ChoiceField(choices=Variant.CHOICES, default=Variant.XBOF)
    ssd_count = serializers.IntegerField(min_value=1, default=DEFAULT_SSD_COUNT)
    seed = serializers.IntegerField(min_value=0, default=0)
    duration_ms = serializers.FloatField(
        allow_null=True, default=None,
        help_text='Simulated time to run. Without it, runs end shortly after their trace does.',
    )
    hardware = HardwareSerializer()
    workloads = WorkloadSerializer(many=True, default=list)
    failures = FailureSerializer(many=True, default=list)
    output = serializers.CharField(allow_null=True, default=None, help_text='Directory for the reports.')
    event_trace = serializers.BooleanField(default=False, help_text='Also write the dispatched event log.')

    def to_internal_value(self, data):
        if isinstance(data, dict) and data.get('hardware') is None:
            data = {**data, 'hardware': {}}
        return super().to_internal_value(data)

    def validate(self, attrs):
        devices = {f'ssd{index}' for index in range(attrs['ssd_count'])}
        errors = {}

        def check(path, device_id):
            if device_id not in devices:
                errors[path] = [f'no SSD {device_id!r} in a JBOF of {attrs["ssd_count"]}']

        for device_id in attrs['hardware']['devices']:
            check(f'hardware.devices.{device_id}', device_id)

        bound = set()
        names = set()
        traced = False
        for index, workload in enumerate(attrs['workloads']):
            if workload['devices'] == [ALL_DEVICES]:
                workload['devices'] = sorted(devices, key=lambda device_id: int(device_id[3:]))
            for position, device_id in enumerate(workload['devices']):
                check(f'workloads.{index}.devices.{position}', device_id)
                bound.add(device_id)
            for source, device_id in workload['device_map'].items():
                check(f'workloads.{index}.device_map.{source}', device_id)
            traced = traced or workload['mode'] == WorkloadMode.TRACE
            name = workload['name'] or f'w{index}'
            if name in names:
                errors[f'workloads.{index}.name'] = [f'duplicate workload name {name!r}']
            names.add(name)

        if attrs['duration_ms'] is None and not traced:
            attrs['duration_ms'] = DEFAULT_DURATION_MS
        if attrs['duration_ms'] is not None and attrs['duration_ms'] <= 0:
            errors['duration_ms'] = ['must be positive']

        for index, failure in enumerate(attrs['failures']):
            check(f'failures.{index}.device', failure['device'])
            if failure['kind'] == FailureKind.BORROWER and failure['device'] not in bound and not traced:
                errors[f'failures.{index}.kind'] = [f'{failure["device"]} runs no workload, it cannot be a borrower']
            if attrs['duration_ms'] is not None and failure['at_ms'] >= attrs['duration_ms']:
                errors[f'failures.{index}.at_ms'] = ['must fall inside the run']
        if errors:
            raise serializers.ValidationError(errors)
        return attrs
