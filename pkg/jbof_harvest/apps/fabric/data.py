"""
Data types for the CXL fabric.
"""
import attr

from .constants import RegionKind


def _positive(instance, attribute, value):
    if value <= 0:
        raise ValueError(f'{attribute.name} must be positive, got {value}')


@attr.s(frozen=True)
class FabricConfig:
    """
    Link and latency parameters of the single-switch fabric.
    """
    # Bytes per second on each device link (PCIe 6.0 x2).
    bandwidth = attr.ib(type=int, default=16_000_000_000, validator=_positive)
    one_way_ns = attr.ib(type=int, default=200, validator=_positive)
    flit_size = attr.ib(type=int, default=256, validator=_positive)
    # Access to a region the requester itself owns never crosses the fabric.
    local_access_ns = attr.ib(type=int, default=50, validator=_positive)

    @property
    def round_trip_ns(self):
        return 2 * self.one_way_ns


@attr.s(frozen=True, slots=True)
class GfamRegion:
    """
    A range of global fabric-attached memory exported by one device.
    """
    owner = attr.ib(type=str)
    base = attr.ib(type=int)
    length = attr.ib(type=int)
    kind = attr.ib(type=str, validator=attr.validators.in_(RegionKind.ALL))

    @property
    def end(self):
        return self.base + self.length

    def contains(self, address, length=1):
        return self.base <= address and address + length <= self.end

    def offset(self, address):
        """
        Region-relative offset; descriptor address fields carry these.
        """
        return address - self.base


@attr.s(frozen=True, slots=True)
class FabricAccess:
    """
    Result of a timed fabric access: the value read (or CAS outcome) and the
    simulated time at which the requester sees the response.
    """
    value = attr.ib()
    done = attr.ib(type=int)
