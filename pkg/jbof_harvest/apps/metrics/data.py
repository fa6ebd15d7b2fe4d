"""
Data types for latency, cost and energy accounting.
"""
import attr

from .constants import LATENCY_BUCKETS


def _positive(instance, attribute, value):
    if value <= 0:
        raise ValueError(f'{attribute.name} must be positive, got {value}')


@attr.s(slots=True)
class LatencyBreakdown:
    """
    Where one command spent its time, in nanoseconds.

    Time is charged stage by stage with ``charge``; whatever a stage's parts do
    not explain is queueing, so the buckets plus queueing always add up to the
    end-to-end latency.
    """
    host = attr.ib(type=int, default=0)
    host_ssd = attr.ib(type=int, default=0)
    processor = attr.ib(type=int, default=0)
    dram = attr.ib(type=int, default=0)
    flash = attr.ib(type=int, default=0)
    inter_ssd = attr.ib(type=int, default=0)
    queueing = attr.ib(type=int, default=0)

    def charge(self, elapsed, **parts):
        """
        Split ``elapsed`` ns over the named buckets, in the order given, capping
        the parts at what is left; the remainder is queueing.
        """
        remaining = max(0, int(elapsed))
        for bucket, amount in parts.items():
            if bucket not in LATENCY_BUCKETS:
                raise ValueError(f'unknown latency bucket {bucket}')
            amount = min(max(0, int(amount)), remaining)
            setattr(self, bucket, getattr(self, bucket) + amount)
            remaining -= amount
        self.queueing += remaining

    @property
    def service(self):
        return sum(getattr(self, bucket) for bucket in LATENCY_BUCKETS)

    @property
    def total(self):
        return self.service + self.queueing

    def as_dict(self):
        return attr.asdict(self)


@attr.s(frozen=True)
class CostModel:
    """
    Bill-of-materials prices in dollars.
    """
    flash_per_128gb = attr.ib(type=float, default=4.95, validator=_positive)
    dram_per_gb = attr.ib(type=float, default=7.2, validator=_positive)
    controller = attr.ib(type=float, default=48.0, validator=_positive)
    other = attr.ib(type=float, default=6.0, validator=_positive)
    # Open-channel drives keep only a minimal controller and no DRAM.
    oc_controller = attr.ib(type=float, default=12.0, validator=_positive)
    dram_gb_per_tb = attr.ib(type=float, default=1.0, validator=_positive)


@attr.s(frozen=True)
class EnergyParams:
    """
    Parametric energy model. Currents in amperes, energies in joules per bit.
    """
    flash_voltage = attr.ib(type=float, default=3.3, validator=_positive)
    flash_op_current = attr.ib(type=float, default=0.025, validator=_positive)
    bus_idle_current = attr.ib(type=float, default=0.005, validator=_positive)
    standby_current = attr.ib(type=float, default=10e-6, validator=_positive)
    phy_per_bit = attr.ib(type=float, default=6e-12, validator=_positive)
    processor_watts = attr.ib(type=float, default=6.45, validator=_positive)
    # The processor rating is for a controller of this many cores.
    processor_reference_cores = attr.ib(type=int, default=6, validator=_positive)
    dram_per_bit = attr.ib(type=float, default=22e-12, validator=_positive)

    @property
    def watts_per_core(self):
        return self.processor_watts / self.processor_reference_cores
