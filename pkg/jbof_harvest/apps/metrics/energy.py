"""
Parametric energy model of one SSD over a run.

* Flash cell operations draw the operating current for their cell time.
* A die outside cell operations draws the standby current; a channel moving
  data draws the bus-idle current of its dies.
* Every bit crossing the host link or the fabric costs the PHY energy.
* Cores draw their share of the controller power while busy.
* Every bit moved through onboard DRAM costs the DRAM access energy.
"""
import attr

from jbof_harvest.apps.core.constants import PS_PER_NS, SEC

from .constants import EnergyComponent
from .data import EnergyParams


@attr.s(frozen=True)
class DeviceActivity:
    """
    What one SSD did over ``duration_ns``, as the energy model needs it.
    """
    duration_ns = attr.ib(type=int)
    dies = attr.ib(type=int)
    cell_ns = attr.ib(factory=dict)
    channel_busy_ns = attr.ib(type=int, default=0)
    dies_per_channel = attr.ib(type=int, default=1)
    link_bytes = attr.ib(type=int, default=0)
    core_busy_ps = attr.ib(type=int, default=0)
    dram_bytes = attr.ib(type=int, default=0)

    @classmethod
    def of(cls, device, duration_ns, fabric=None):
        geometry = device.config.geometry
        link_bytes = device.counts['read_bytes'] + device.counts['write_bytes']
        if fabric is not None:
            link_bytes += fabric.link_bytes[device.id]
        return cls(
            duration_ns=duration_ns,
            dies=geometry.dies,
            cell_ns=dict(device.flash.cell_ns),
            channel_busy_ns=sum(channel.busy_ns for channel in device.flash.channels),
            dies_per_channel=geometry.dies_per_channel,
            link_bytes=link_bytes,
            # Open-channel drives run on host cores, accounted by the host.
            core_busy_ps=device.cores.busy_ps if device.cores.owner is device else 0,
            dram_bytes=device.dram_bytes,
        )


def energy_account(activity, params=None):
    """
    Joules spent by each ``EnergyComponent``, plus their ``total``.
    """
    params = params or EnergyParams()
    volts = params.flash_voltage
    cell_ns = sum(activity.cell_ns.values())
    idle_ns = max(0, activity.dies * activity.duration_ns - cell_ns)
    account = {
        EnergyComponent.FLASH_OPS: volts * params.flash_op_current * cell_ns / SEC,
        EnergyComponent.FLASH_IDLE: volts * (
            params.standby_current * idle_ns
            + params.bus_idle_current * activity.channel_busy_ns * activity.dies_per_channel
        ) / SEC,
        EnergyComponent.PHY: params.phy_per_bit * activity.link_bytes * 8,
        EnergyComponent.PROCESSOR: params.watts_per_core * activity.core_busy_ps / (SEC * PS_PER_NS),
        EnergyComponent.DRAM: params.dram_per_bit * activity.dram_bytes * 8,
    }
    account['total'] = sum(account[component] for component in EnergyComponent.ALL)
    return account
