"""
Factories for the attrs configuration objects, sized for fast tests.
"""
import factory

from jbof_harvest.apps.core.constants import MB
from jbof_harvest.apps.flash.data import FlashGeometry, FlashTiming
from jbof_harvest.apps.host.data import HostConfig
from jbof_harvest.apps.ssd.data import ComputeEndConfig, SsdConfig


class FlashGeometryFactory(factory.Factory):
    """
    A 256 MB array: 4 dies of 64 blocks of 64 pages.
    """
    class Meta:
        model = FlashGeometry

    channels = 2
    dies_per_channel = 2
    planes_per_die = 1
    blocks_per_plane = 64
    pages_per_block = 64


class ComputeEndConfigFactory(factory.Factory):
    class Meta:
        model = ComputeEndConfig

    core_count = 6
    dram_capacity = 4 * MB


class SsdConfigFactory(factory.Factory):
    class Meta:
        model = SsdConfig

    geometry = factory.SubFactory(FlashGeometryFactory)
    timing = factory.LazyFunction(FlashTiming)
    compute = factory.SubFactory(ComputeEndConfigFactory)
    write_buffer_bytes = 1 * MB
    prefill = 0.5


class HostConfigFactory(factory.Factory):
    class Meta:
        model = HostConfig

    vh_staging_pages = 1024
