"""
Per-command measurement: throughput series, latency distribution and latency
breakdown of every completed workload command.
"""
import logging
import math
from collections import Counter, defaultdict

import numpy as np

from jbof_harvest.apps.core.exceptions import InvariantViolation
from jbof_harvest.apps.core.utils import ceil_div
from jbof_harvest.apps.ssd.constants import CommandStatus, Opcode

from .constants import HISTOGRAM_STEPS_PER_OCTAVE, LATENCY_BUCKETS, PERCENTILES, SERIES_WINDOW_NS

logger = logging.getLogger(__name__)

AGGREGATE = 'all'


class LatencySamples:
    """
    Latency samples kept exactly up to ``cap``; past it, every sample goes into
    a log-scale histogram and percentiles become estimates.
    """

    def __init__(self, cap):
        self.cap = cap
        self.count = 0
        self.sum = 0
        self.max = 0
        self._exact = []
        self._histogram = None

    @property
    def exact(self):
        return self._histogram is None

    def add(self, value):
        self.count += 1
        self.sum += value
        self.max = max(self.max, value)
        if self._histogram is None:
            self._exact.append(value)
            if len(self._exact) > self.cap:
                self._histogram = Counter(self._bucket(sample) for sample in self._exact)
                self._exact = []
                logger.info('[metrics] latency samples passed %s, switching to a histogram', self.cap)
        else:
            self._histogram[self._bucket(value)] += 1

    @staticmethod
    def _bucket(value):
        return int(math.floor(math.log2(max(1, value)) * HISTOGRAM_STEPS_PER_OCTAVE))

    @staticmethod
    def _bucket_value(bucket):
        return 2 ** ((bucket + 0.5) / HISTOGRAM_STEPS_PER_OCTAVE)

    @property
    def mean(self):
        return self.sum / self.count if self.count else 0.0

    def percentile(self, q):
        if not self.count:
            return 0.0
        if self._histogram is None:
            return float(np.percentile(np.asarray(self._exact), q))
        target = q / 100 * self.count
        seen = 0
        for bucket in sorted(self._histogram):
            seen += self._histogram[bucket]
            if seen >= target:
                return min(float(self.max), self._bucket_value(bucket))
        return float(self.max)

    def summary(self):
        summary = {'count': self.count, 'mean_ns': round(self.mean, 3), 'max_ns': self.max, 'exact': self.exact}
        for q in PERCENTILES:
            summary[f'p{q}_ns'] = round(self.percentile(q), 3)
        return summary


class DeviceMetrics:
    """
    Accumulators for the commands addressed to one SSD (or to all of them).
    """

    def __init__(self, cap, window_ns):
        self.window_ns = window_ns
        self.counts = Counter()
        self.bytes = Counter()
        self.latency = LatencySamples(cap)
        self.breakdown = Counter()
        self.series = defaultdict(int)

    def add(self, cmd):
        if cmd.status == CommandStatus.ERROR:
            self.counts['errors'] += 1
            return
        self.counts['completed'] += 1
        self.counts[cmd.opcode] += 1
        if cmd.redirected:
            self.counts['redirected'] += 1
        self.bytes[cmd.opcode] += cmd.nbytes
        self.series[cmd.complete_time // self.window_ns] += cmd.nbytes
        self.latency.add(cmd.complete_time - cmd.submit_time)
        for bucket, value in cmd.latency.as_dict().items():
            self.breakdown[bucket] += value

    def throughput_series(self, windows):
        """
        Bytes per second in each window, zeros included.
        """
        scale = 1e9 / self.window_ns
        return [round(self.series.get(index, 0) * scale, 3) for index in range(windows)]

    def summary(self, duration_ns):
        completed = self.counts['completed']
        moved = self.bytes[Opcode.READ] + self.bytes[Opcode.WRITE]
        seconds = duration_ns / 1e9 if duration_ns else 0
        return {
            'completed': completed,
            'errors': self.counts['errors'],
            'reads': self.counts[Opcode.READ],
            'writes': self.counts[Opcode.WRITE],
            'redirected': self.counts['redirected'],
            'read_bytes': self.bytes[Opcode.READ],
            'write_bytes': self.bytes[Opcode.WRITE],
            'throughput_bps': round(moved / seconds, 3) if seconds else 0.0,
            'iops': round(completed / seconds, 3) if seconds else 0.0,
            'latency': self.latency.summary(),
            'breakdown_mean_ns': {
                bucket: round(self.breakdown[bucket] / completed, 3) if completed else 0.0
                for bucket in LATENCY_BUCKETS + ('queueing',)
            },
        }


class MetricsCollector:
    """
    Receives every completed workload command from the host.

    Commands are filed under the SSD the workload addressed. Each one is
    checked on the way in: its latency buckets plus queueing must add up to its
    end-to-end latency.
    """

    def __init__(self, sample_cap=2_000_000, window_ns=SERIES_WINDOW_NS):
        self.sample_cap = sample_cap
        self.window_ns = window_ns
        self.devices = {}
        self.aggregate = DeviceMetrics(sample_cap, window_ns)

    def of(self, device_id):
        metrics = self.devices.get(device_id)
        if metrics is None:
            metrics = self.devices[device_id] = DeviceMetrics(self.sample_cap, self.window_ns)
        return metrics

    def record(self, cmd):
        if cmd.status != CommandStatus.ERROR:
            elapsed = cmd.complete_time - cmd.submit_time
            if cmd.latency.total != elapsed:
                raise InvariantViolation(
                    f'command {cmd.cmd_id}: latency buckets add up to {cmd.latency.total} ns, '
                    f'end to end took {elapsed} ns'
                )
        self.of(cmd.origin).add(cmd)
        self.aggregate.add(cmd)

    def summary(self, duration_ns):
        windows = max(1, ceil_div(duration_ns, self.window_ns))
        result = {}
        for device_id in sorted(self.devices):
            metrics = self.devices[device_id]
            result[device_id] = {
                **metrics.summary(duration_ns),
                'throughput_series_bps': metrics.throughput_series(windows),
            }
        result[AGGREGATE] = {
            **self.aggregate.summary(duration_ns),
            'throughput_series_bps': self.aggregate.throughput_series(windows),
        }
        return result


class UtilizationProbe:
    """
    Samples the resource monitor of SSDs nothing else samples (no harvesting
    agent or virtual harvesting manager), once per window, so every variant
    reports a utilization series.
    """

    def __init__(self, engine, devices, window_ns):
        self.engine = engine
        self.devices = list(devices)
        self.window_ns = window_ns
        self.id = 'metrics.probe'
        engine.register(self.id, self)

    def start(self):
        self.engine.schedule(self.window_ns, self.id, 'window')

    def on_window(self):
        for device in self.devices:
            if not device.failed:
                device.monitor.sample()
        self.engine.schedule(self.window_ns, self.id, 'window')
