"""
Per-SSD resource monitor: polls core, flash and mapping-cache counters once
per window, like firmware reading its performance monitor unit.
"""
from jbof_harvest.apps.core.constants import PS_PER_NS
from jbof_harvest.apps.core.utils import fraction

from .constants import BusyTag
from .data import UtilizationSample
from .exceptions import SampleWindowError


class ResourceMonitor:
    """
    Turns cumulative counters of one SSD into windowed ``UtilizationSample``s.
    """

    def __init__(self, device, window_ns):
        self.device = device
        self.window_ns = window_ns
        self.history = []
        self._last_ns = 0
        self._busy_ps = 0
        self._guest_ps = 0
        self._offloaded_ps = 0

    def sample(self):
        """
        Close the window ending now. At least one full window must have elapsed
        since the previous sample.
        """
        device = self.device
        now = device.engine.now
        if now - self._last_ns < self.window_ns:
            raise SampleWindowError(
                f'{device.id}: only {now - self._last_ns} ns since the last sample, window is {self.window_ns}'
            )
        start = now - self.window_ns
        cores = device.cores
        capacity_ps = cores.servers * self.window_ns * PS_PER_NS
        busy = cores.busy_ps - self._busy_ps
        guest = cores.busy_by_tag[BusyTag.REMOTE] - self._guest_ps
        offloaded = device.offloaded_ps - self._offloaded_ps
        self._busy_ps = cores.busy_ps
        self._guest_ps = cores.busy_by_tag[BusyTag.REMOTE]
        self._offloaded_ps = device.offloaded_ps
        self._last_ns = now

        accesses, misses = device.mapping.take_window()
        own_capacity_ps = device.config.compute.core_count * self.window_ns * PS_PER_NS
        sample = UtilizationSample(
            start=start,
            end=now,
            processor=fraction(busy, capacity_ps),
            flash=device.flash.utilization_window(start, now),
            miss_ratio=fraction(misses, accesses),
            guest=fraction(guest, capacity_ps),
            offloaded=offloaded / own_capacity_ps,
        )
        self.history.append(sample)
        return sample
