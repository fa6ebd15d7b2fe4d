"""
Configuration and sample types of a simulated SSD.
"""
import attr

from jbof_harvest.apps.core.constants import MB
from jbof_harvest.apps.flash.data import FlashGeometry, FlashTiming

from .constants import AGENT_UNWRAP_PS, SEGMENT_SIZE, WINDOW_NS


def _positive(instance, attribute, value):
    if value is not None and value <= 0:
        raise ValueError(f'{attribute.name} must be positive, got {value}')


def _fraction(instance, attribute, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f'{attribute.name} must be in [0, 1], got {value}')


@attr.s(frozen=True)
class ComputeEndConfig:
    """
    Firmware cores and onboard DRAM of one SSD.

    ``dram_capacity`` of None means 1 GB of DRAM per TB of flash.
    ``shrunk_dram_per_tb`` sets the GB of DRAM per TB of flash the shrunk
    variants run with; None halves the conventional DRAM.
    """
    core_count = attr.ib(type=int, default=6, validator=_positive)
    core_frequency = attr.ib(type=int, default=1_000_000_000, validator=_positive)
    dram_capacity = attr.ib(default=None, validator=_positive)
    dram_access_ns = attr.ib(type=int, default=50, validator=_positive)
    dram_pj_per_bit = attr.ib(type=float, default=22.0, validator=_positive)
    shrunk_dram_per_tb = attr.ib(default=None, validator=_positive)

    def dram_bytes(self, flash_capacity):
        capacity = self.dram_capacity if self.dram_capacity is not None else flash_capacity // 1024
        if capacity < SEGMENT_SIZE:
            raise ValueError(f'DRAM capacity {capacity} is smaller than one {SEGMENT_SIZE}-byte segment')
        return capacity


@attr.s(frozen=True)
class FirmwareCostModel:
    """
    Firmware cycles per step of a command. ``scale`` multiplies every cost
    (firmware running on a foreign processor).
    """
    fetch_parse = attr.ib(type=int, default=600, validator=_positive)
    translate = attr.ib(type=int, default=900, validator=_positive)
    dma_issue = attr.ib(type=int, default=300, validator=_positive)
    flash_issue = attr.ib(type=int, default=200, validator=_positive)
    completion = attr.ib(type=int, default=400, validator=_positive)
    sync_overhead = attr.ib(type=int, default=300, validator=_positive)
    scale = attr.ib(type=float, default=1.0, validator=_positive)

    def cycles(self, step, count=1):
        return int(round(getattr(self, step) * count * self.scale))


@attr.s(frozen=True)
class SsdConfig:
    """
    Everything that shapes one simulated SSD.
    """
    geometry = attr.ib(type=FlashGeometry, factory=FlashGeometry)
    timing = attr.ib(type=FlashTiming, factory=FlashTiming)
    compute = attr.ib(type=ComputeEndConfig, factory=ComputeEndConfig)
    firmware = attr.ib(type=FirmwareCostModel, factory=FirmwareCostModel)
    write_buffer_bytes = attr.ib(type=int, default=16 * MB, validator=_positive)
    # A partially filled buffer page is programmed after this long.
    buffer_flush_ns = attr.ib(type=int, default=100_000, validator=_positive)
    overprovision = attr.ib(type=float, default=0.07, validator=_fraction)
    gc_low_watermark = attr.ib(type=float, default=0.05, validator=_fraction)
    gc_high_watermark = attr.ib(type=float, default=0.10, validator=_fraction)
    # Share of the logical space that holds data before the run starts.
    prefill = attr.ib(type=float, default=0.5, validator=_fraction)
    # Load mapping pages into DRAM (up to capacity) before the run starts.
    warm_mapping = attr.ib(type=bool, default=True)
    agent_queue_depth = attr.ib(type=int, default=64, validator=_positive)
    agent_unwrap_ps = attr.ib(type=int, default=AGENT_UNWRAP_PS, validator=_positive)
    host_read_bandwidth = attr.ib(type=int, default=14_000_000_000, validator=_positive)
    host_write_bandwidth = attr.ib(type=int, default=10_000_000_000, validator=_positive)
    window_ns = attr.ib(type=int, default=WINDOW_NS, validator=_positive)

    def __attrs_post_init__(self):
        if self.gc_low_watermark >= self.gc_high_watermark:
            raise ValueError('the GC low watermark must be below the high watermark')

    @property
    def dram_bytes(self):
        return self.compute.dram_bytes(self.geometry.capacity_bytes)


@attr.s(frozen=True)
class UtilizationSample:
    """
    Resource usage of one SSD over one monitoring window.

    ``offloaded`` is the core time other devices spent on this SSD's commands,
    relative to this SSD's own core capacity; it may exceed 1.
    """
    start = attr.ib(type=int)
    end = attr.ib(type=int)
    processor = attr.ib(type=float, validator=_fraction)
    flash = attr.ib(type=float, validator=_fraction)
    miss_ratio = attr.ib(type=float, validator=_fraction)
    guest = attr.ib(type=float, default=0.0, validator=_fraction)
    offloaded = attr.ib(type=float, default=0.0)

    @property
    def window(self):
        return self.end - self.start

    @property
    def own_processor(self):
        """Core usage excluding work done for borrowers."""
        return max(0.0, self.processor - self.guest)

    @property
    def effective_processor(self):
        """Core demand of this SSD's own commands, wherever they ran."""
        return self.own_processor + self.offloaded

    def as_dict(self):
        return {
            'start_ns': self.start,
            'end_ns': self.end,
            'processor': round(self.processor, 6),
            'flash': round(self.flash, 6),
            'miss_ratio': round(self.miss_ratio, 6),
            'guest': round(self.guest, 6),
            'offloaded': round(self.offloaded, 6),
        }
