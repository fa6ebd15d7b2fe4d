"""
Run reports: ``report.json`` (everything, machine readable) and
``summary.csv`` (one row per SSD plus the aggregate).

Reports hold simulated quantities only, rendered with sorted keys, so the same
(configuration, seed) always produces byte-identical files.
"""
import csv
import json
import logging
import os

import numpy as np

from jbof_harvest.apps.core.constants import LPN_SIZE, SEC, TB
from jbof_harvest.apps.flash.constants import FlashOpKind

from .collector import AGGREGATE
from .constants import EnergyComponent
from .cost import bom_cost, bom_saving, cost_efficiency
from .energy import DeviceActivity, energy_account

logger = logging.getLogger(__name__)

SCHEMA_VERSION = '1.0'
REFERENCE_CAPACITY_TB = 2
DAY_NS = 86_400 * SEC

SUMMARY_COLUMNS = (
    'device', 'completed', 'errors', 'throughput_bps', 'iops', 'mean_latency_ns', 'p50_latency_ns',
    'p99_latency_ns', 'processor_utilization', 'flash_utilization', 'miss_ratio', 'write_amplification', 'dwpd',
    'energy_j',
)


def _mean(values):
    return round(float(np.mean(values)), 6) if values else 0.0


def device_report(device, duration_ns, fabric=None, energy_params=None):
    """
    Resource usage, endurance and energy of one SSD over the run.
    """
    history = device.monitor.history
    totals = device.mapping.totals
    programs = device.flash.op_counts[FlashOpKind.PROGRAM]
    capacity = device.ftl.lpn_count * LPN_SIZE
    physical = programs * device.config.geometry.page_size
    days = duration_ns / DAY_NS
    energy = energy_account(DeviceActivity.of(device, duration_ns, fabric), energy_params)
    report = {
        'failed': device.failed,
        'capacity_bytes': capacity,
        'utilization': {
            'processor': _mean([sample.processor for sample in history]),
            'flash': _mean([sample.flash for sample in history]),
            'series': [sample.as_dict() for sample in history],
        },
        'mapping': {
            'miss_ratio': round(totals['misses'] / totals['accesses'], 6) if totals['accesses'] else 0.0,
            **device.mapping.snapshot(),
        },
        'physical_write_bytes': physical,
        'write_amplification': round(device.write_amplification, 6),
        'dwpd': round(physical / capacity / days, 6) if days and capacity else 0.0,
        'energy_j': {component: round(value, 12) for component, value in energy.items()},
        'counters': device.counters(),
    }
    if device.agent is not None:
        report['harvest'] = device.agent.as_dict()
    return report


def build_report(platform, collector, duration_ns, name='', seed=0, config=None, drivers=(), failures=(),
                 energy_params=None, schema_version=SCHEMA_VERSION):
    """
    Gather the report of a finished run as plain data.
    """
    workload = collector.summary(duration_ns)
    devices = {}
    for device in platform.devices:
        devices[device.id] = {
            'workload': workload.get(device.id, {}),
            **device_report(device, duration_ns, platform.fabric, energy_params),
        }
    aggregate = workload[AGGREGATE]
    energy_total = {
        component: round(sum(entry['energy_j'][component] for entry in devices.values()), 12)
        for component in EnergyComponent.ALL + ('total',)
    }
    capacity_tb = platform.devices[0].ftl.lpn_count * LPN_SIZE / TB
    per_ssd = bom_cost(capacity_tb, platform.variant)
    report = {
        'schema_version': schema_version,
        'scenario': name,
        'variant': platform.variant,
        'seed': seed,
        'config': config or {},
        'duration_ns': duration_ns,
        'dispatch': platform.engine.stats().as_dict(),
        'aggregate': {
            **aggregate,
            'processor_utilization': _mean([entry['utilization']['processor'] for entry in devices.values()]),
            'flash_utilization': _mean([entry['utilization']['flash'] for entry in devices.values()]),
            'physical_write_bytes': sum(entry['physical_write_bytes'] for entry in devices.values()),
            'energy_j': energy_total,
        },
        'cost': {
            'per_ssd_usd': per_ssd,
            'reference_usd': bom_cost(REFERENCE_CAPACITY_TB, platform.variant),
            'reference_capacity_tb': REFERENCE_CAPACITY_TB,
            'saving_vs_conv': round(bom_saving(REFERENCE_CAPACITY_TB, platform.variant), 6),
            'mbps_per_usd': round(cost_efficiency(aggregate['throughput_bps'], per_ssd * len(platform.devices)), 6),
        },
        'devices': devices,
        'host': platform.host.snapshot(),
        'drivers': [driver.stats() for driver in drivers],
        'failures': list(failures),
    }
    if platform.registry is not None:
        report['harvest'] = platform.registry.as_dict()
    if platform.vh is not None:
        report['virtual_harvesting'] = platform.vh.snapshot()
    return report


def summary_rows(report):
    rows = []
    entries = [(device_id, entry['workload'], entry) for device_id, entry in sorted(report['devices'].items())]
    entries.append((AGGREGATE, report['aggregate'], None))
    for device_id, workload, entry in entries:
        latency = workload.get('latency', {})
        if entry is None:
            resources = {
                'processor_utilization': report['aggregate']['processor_utilization'],
                'flash_utilization': report['aggregate']['flash_utilization'],
                'miss_ratio': '',
                'write_amplification': '',
                'dwpd': '',
                'energy_j': report['aggregate']['energy_j']['total'],
            }
        else:
            resources = {
                'processor_utilization': entry['utilization']['processor'],
                'flash_utilization': entry['utilization']['flash'],
                'miss_ratio': entry['mapping']['miss_ratio'],
                'write_amplification': entry['write_amplification'],
                'dwpd': entry['dwpd'],
                'energy_j': entry['energy_j']['total'],
            }
        rows.append({
            'device': device_id,
            'completed': workload.get('completed', 0),
            'errors': workload.get('errors', 0),
            'throughput_bps': workload.get('throughput_bps', 0.0),
            'iops': workload.get('iops', 0.0),
            'mean_latency_ns': latency.get('mean_ns', 0.0),
            'p50_latency_ns': latency.get('p50_ns', 0.0),
            'p99_latency_ns': latency.get('p99_ns', 0.0),
            **resources,
        })
    return rows


def write_report(report, out_dir, report_file='report.json', summary_file='summary.csv'):
    """
    Write both report files into ``out_dir``; returns their paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    report_path = os.path.join(out_dir, report_file)
    summary_path = os.path.join(out_dir, summary_file)
    with open(report_path, 'w', encoding='utf-8') as stream:
        stream.write(json.dumps(report, indent=2, sort_keys=True))
        stream.write('\n')
    with open(summary_path, 'w', newline='', encoding='utf-8') as stream:
        writer = csv.DictWriter(stream, fieldnames=SUMMARY_COLUMNS, lineterminator='\n')
        writer.writeheader()
        writer.writerows(summary_rows(report))
    logger.info('[metrics] wrote %s and %s', report_path, summary_path)
    return report_path, summary_path
