"""
Testing utilities for the simulator.
"""
import shutil
import tempfile

import attr
import yaml

from jbof_harvest.apps.core.constants import Variant
from jbof_harvest.apps.engine.api import SimulationEngine
from jbof_harvest.apps.fabric.api import CxlFabric
from jbof_harvest.apps.host.driver import HostDriver
from jbof_harvest.apps.ssd.device import SsdDevice
from test_utils.factories import HostConfigFactory, SsdConfigFactory


@attr.s
class SmallJbof:
    engine = attr.ib()
    fabric = attr.ib()
    host = attr.ib()
    devices = attr.ib(factory=dict)


def small_jbof(ssd_count=2, seed=0, ssd_config=None, host_config=None):
    """
    An engine, fabric and host with ``ssd_count`` small SSDs attached, not started.
    """
    engine = SimulationEngine(seed=seed)
    fabric = CxlFabric(engine)
    jbof = SmallJbof(engine, fabric, HostDriver(engine, fabric, host_config or HostConfigFactory()))
    for index in range(ssd_count):
        device = SsdDevice(engine, f'ssd{index}', ssd_config or SsdConfigFactory(), fabric=fabric)
        jbof.host.attach(device)
        jbof.devices[device.id] = device
    return jbof


def small_hardware():
    """
    Scenario hardware overrides matching the test factories: small flash arrays
    and DRAM, so scenarios of a few milliseconds run quickly.
    """
    return {
        'ssd': attr.asdict(SsdConfigFactory(), retain_collection_types=False),
        'host': {'vh_staging_pages': 1024},
    }


def scenario_document(**changes):
    """
    A small valid scenario: two conventional SSDs under random 4 KB reads.
    """
    document = {
        'name': 'test',
        'variant': Variant.CONV,
        'ssd_count': 2,
        'seed': 7,
        'duration_ms': 5,
        'hardware': small_hardware(),
        'workloads': [
            {'name': 'reads', 'mode': 'microbench', 'devices': ['ssd0', 'ssd1'], 'op': 'read', 'size_kb': 4,
             'iodepth': 8},
        ],
    }
    document.update(changes)
    return document


class TempDirMixin:
    """
    Gives each test a scratch directory, removed afterwards.
    """

    def setUp(self):
        super().setUp()
        self.tmp_dir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.tmp_dir, ignore_errors=True)

    def write_yaml(self, name, document):
        path = f'{self.tmp_dir}/{name}'
        with open(path, 'w', encoding='utf-8') as stream:
            yaml.safe_dump(document, stream)
        return path
