"""
Assembling a simulated JBOF for one platform variant.
"""
import logging

import attr

from jbof_harvest.apps.core.constants import Variant
from jbof_harvest.apps.engine.api import SimulationEngine
from jbof_harvest.apps.fabric.api import CxlFabric
from jbof_harvest.apps.harvest.api import HarvestAgent, HarvestRegistry
from jbof_harvest.apps.harvest.data import HarvestPolicy
from jbof_harvest.apps.host.baselines import OpenChannelHost, VirtualHarvesting
from jbof_harvest.apps.host.data import HostConfig
from jbof_harvest.apps.host.driver import HostDriver
from jbof_harvest.apps.metrics.collector import UtilizationProbe
from jbof_harvest.apps.ssd.constants import MAP_PAGE_SIZE
from jbof_harvest.apps.ssd.data import SsdConfig
from jbof_harvest.apps.ssd.device import SsdDevice

from .constants import MIN_MAPPING_REGIONS, OC_FIRMWARE_SCALE, SHRUNK_DRAM_FLOOR
from .exceptions import ScenarioError

logger = logging.getLogger(__name__)


@attr.s
class Platform:
    """
    Everything one run simulates.
    """
    variant = attr.ib(type=str)
    engine = attr.ib()
    fabric = attr.ib()
    host = attr.ib()
    devices = attr.ib(factory=list)
    registry = attr.ib(default=None)
    vh = attr.ib(default=None)
    oc = attr.ib(default=None)
    probe = attr.ib(default=None)

    def device(self, device_id):
        return self.host.devices[device_id]

    def start(self):
        self.host.start()
        if self.registry is not None:
            for agent in self.registry.agents.values():
                agent.start()
        if self.vh is not None:
            self.vh.start()
        if self.probe is not None:
            self.probe.start()

    def fail(self, device_id):
        """
        Stop a device; the host notices through its keep-alive probes.
        """
        self.device(device_id).fail()


def variant_ssd_config(variant, config):
    """
    The per-SSD configuration a variant actually runs.

    Shrunk variants halve the compute-end cores and, unless the configuration
    names a DRAM ratio for them, the DRAM; open-channel drives run slower
    firmware on the host.
    """
    if variant in Variant.SHRUNK_RESOURCES:
        compute = config.compute
        if compute.shrunk_dram_per_tb is None:
            dram = config.dram_bytes // 2
        else:
            dram = int(config.geometry.capacity_bytes * compute.shrunk_dram_per_tb) // 1024
        dram = max(SHRUNK_DRAM_FLOOR, dram)
        config = attr.evolve(
            config,
            compute=attr.evolve(compute, core_count=max(1, compute.core_count // 2), dram_capacity=dram),
        )
    if variant == Variant.OC:
        config = attr.evolve(config, firmware=attr.evolve(config.firmware, scale=OC_FIRMWARE_SCALE))
    return config


def build_platform(variant=Variant.XBOF, ssd_count=12, ssd_config=None, host_config=None, fabric_config=None,
                   policy=None, seed=0, collector=None, device_configs=None):
    """
    Build the engine, fabric, host and SSDs of one variant, wired but not started.

    ``device_configs`` maps SSD ids to configurations that replace ``ssd_config``
    for those SSDs; the variant adjustments apply to them too.
    """
    if variant not in Variant.ALL:
        raise ScenarioError(f'unknown variant {variant!r}')
    if ssd_count < 1:
        raise ScenarioError('a JBOF needs at least one SSD')
    engine = SimulationEngine(seed=seed)
    fabric = CxlFabric(engine, fabric_config)
    host_config = host_config or HostConfig()
    host = HostDriver(engine, fabric, host_config, collector=collector)
    config = variant_ssd_config(variant, ssd_config or SsdConfig())
    platform = Platform(variant, engine, fabric, host)

    cores = None
    mapping_regions = None
    if variant == Variant.OC:
        platform.oc = OpenChannelHost(host)
        cores = host.cores
        mapping_regions = max(MIN_MAPPING_REGIONS, host_config.dram_capacity // MAP_PAGE_SIZE // ssd_count)
    device_configs = device_configs or {}
    for index in range(ssd_count):
        device_id = f'ssd{index}'
        device_config = config
        if device_id in device_configs:
            device_config = variant_ssd_config(variant, device_configs[device_id])
        device = SsdDevice(
            engine, device_id, device_config, fabric=fabric, cores=cores, mapping_regions=mapping_regions,
        )
        host.attach(device)
        platform.devices.append(device)
        if platform.oc is not None:
            platform.oc.add(device)

    if variant in Variant.PROCESSOR_HARVESTING:
        policy = policy or HarvestPolicy()
        policy = attr.evolve(policy, dram=policy.dram and variant in Variant.DRAM_HARVESTING)
        platform.registry = HarvestRegistry(engine, fabric, host)
        for device in platform.devices:
            HarvestAgent(device, platform.registry, policy)
    elif variant in Variant.VIRTUAL_HARVESTING:
        watermark = (policy or HarvestPolicy()).watermark
        platform.vh = VirtualHarvesting(
            host, ideal=variant == Variant.VH_IDEAL, watermark=watermark, window_ns=config.window_ns,
        )
    else:
        platform.probe = UtilizationProbe(engine, platform.devices, config.window_ns)
    logger.info('[scenario] built %s platform with %s SSDs', variant, ssd_count)
    return platform
