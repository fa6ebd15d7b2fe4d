"""
Tests for the energy model.
"""
import pytest

from jbof_harvest.apps.core.constants import MS, Variant
from jbof_harvest.apps.scenarios.platform import build_platform
from jbof_harvest.apps.workload.constants import TraceOp
from jbof_harvest.apps.workload.data import TraceRecord
from jbof_harvest.apps.workload.drivers import TraceReplayDriver
from test_utils.factories import HostConfigFactory, SsdConfigFactory

from ..constants import EnergyComponent
from ..data import EnergyParams
from ..energy import DeviceActivity, energy_account


class TestEnergyAccount:
    """
    Tests for ``energy_account``.
    """

    def test_one_lsb_read(self):
        activity = DeviceActivity(duration_ns=30_000, dies=1, cell_ns={'read': 30_000})
        account = energy_account(activity)
        assert account[EnergyComponent.FLASH_OPS] == pytest.approx(2.475e-6)
        assert account[EnergyComponent.FLASH_IDLE] == 0

    def test_idle_run_only_draws_standby(self):
        activity = DeviceActivity(duration_ns=10 ** 9, dies=4)
        account = energy_account(activity)
        assert account[EnergyComponent.FLASH_IDLE] == pytest.approx(4 * 3.3 * 10e-6)
        for component in (EnergyComponent.FLASH_OPS, EnergyComponent.PHY, EnergyComponent.PROCESSOR,
                          EnergyComponent.DRAM):
            assert account[component] == 0
        assert account['total'] == pytest.approx(account[EnergyComponent.FLASH_IDLE])

    def test_components(self):
        activity = DeviceActivity(
            duration_ns=10 ** 9, dies=1, cell_ns={'program': 10 ** 9}, link_bytes=1_000,
            core_busy_ps=10 ** 12, dram_bytes=1_000,
        )
        params = EnergyParams()
        account = energy_account(activity, params)
        assert account[EnergyComponent.PHY] == pytest.approx(8_000 * 6e-12)
        assert account[EnergyComponent.DRAM] == pytest.approx(8_000 * 22e-12)
        # One core busy for one second.
        assert account[EnergyComponent.PROCESSOR] == pytest.approx(6.45 / 6)
        assert account['total'] == pytest.approx(sum(account[c] for c in EnergyComponent.ALL))

    def test_harvesting_costs_more_energy_than_conventional(self):
        records = [
            TraceRecord(timestamp_us=index * 75, device='ssd0', op=TraceOp.READ, offset=index * 64 * 4096, size=4096)
            for index in range(400)
        ]
        totals = {}
        for variant in (Variant.CONV, Variant.XBOF):
            platform = build_platform(
                variant, ssd_count=2, ssd_config=SsdConfigFactory(), host_config=HostConfigFactory(), seed=1,
            )
            platform.start()
            driver = TraceReplayDriver(platform.engine, platform.host, records)
            driver.start()
            platform.engine.run_until(40 * MS)
            assert driver.completed == 400
            totals[variant] = sum(
                energy_account(DeviceActivity.of(device, 40 * MS, platform.fabric))['total']
                for device in platform.devices
            )
        # Same commands; the harvesting daemon and fabric traffic come on top.
        assert totals[Variant.XBOF] > totals[Variant.CONV]
