"""
Data types for the flash backbone.
"""
import attr

from jbof_harvest.apps.core.utils import ceil_div

from .constants import FlashOpKind, PageType, TimingUnit


def _positive(instance, attribute, value):
    if value < 1:
        raise ValueError(f'{attribute.name} must be >= 1, got {value}')


@attr.s(frozen=True)
class FlashGeometry:
    """
    Shape of one SSD's flash array. Defaults give 4 TB.
    """
    channels = attr.ib(type=int, default=8, validator=_positive)
    dies_per_channel = attr.ib(type=int, default=8, validator=_positive)
    planes_per_die = attr.ib(type=int, default=4, validator=_positive)
    blocks_per_plane = attr.ib(type=int, default=1024, validator=_positive)
    pages_per_block = attr.ib(type=int, default=1024, validator=_positive)
    page_size = attr.ib(type=int, default=16384, validator=_positive)
    # Megatransfers per second on an 8-bit bus, i.e. MB/s.
    channel_rate = attr.ib(type=int, default=2400, validator=_positive)

    @property
    def dies(self):
        return self.channels * self.dies_per_channel

    @property
    def blocks_per_die(self):
        return self.planes_per_die * self.blocks_per_plane

    @property
    def pages_per_die(self):
        return self.blocks_per_die * self.pages_per_block

    @property
    def total_pages(self):
        return self.dies * self.pages_per_die

    @property
    def capacity_bytes(self):
        return self.total_pages * self.page_size

    @property
    def transfer_ns(self):
        """Time to move one page over the channel."""
        return ceil_div(self.page_size * 1000, self.channel_rate)

    def die_index(self, channel, die):
        return channel * self.dies_per_channel + die


@attr.s(frozen=True)
class FlashTiming:
    """
    Cell latencies in nanoseconds, per page type (LSB, CSB, MSB).
    """
    read_ns = attr.ib(default=(30_000, 45_000, 60_000), converter=tuple)
    program_ns = attr.ib(default=(200_000, 280_000, 400_000), converter=tuple)
    erase_ns = attr.ib(type=int, default=3_000_000)
    msb_unit = attr.ib(type=str, default=TimingUnit.MICROSECONDS, validator=attr.validators.in_(TimingUnit.ALL))

    def __attrs_post_init__(self):
        # Checked on the configured rows; the literal millisecond reading scales MSB afterwards.
        for page_type in (PageType.LSB, PageType.CSB, PageType.MSB):
            if not self.read_ns[page_type] < self.program_ns[page_type] < self.erase_ns:
                raise ValueError(f'read < program < erase must hold for page type {page_type}')

    def _msb_scale(self, page_type):
        if page_type == PageType.MSB and self.msb_unit == TimingUnit.MILLISECONDS:
            return 1000
        return 1

    def read(self, page_type):
        return self.read_ns[page_type] * self._msb_scale(page_type)

    def program(self, page_type):
        return self.program_ns[page_type] * self._msb_scale(page_type)

    def cell_time(self, kind, page_type):
        if kind == FlashOpKind.READ:
            return self.read(page_type)
        if kind == FlashOpKind.PROGRAM:
            return self.program(page_type)
        return self.erase_ns


@attr.s(frozen=True, slots=True)
class FlashAddress:
    channel = attr.ib(type=int)
    die = attr.ib(type=int)
    plane = attr.ib(type=int)
    block = attr.ib(type=int)
    page = attr.ib(type=int, default=0)

    @property
    def block_key(self):
        return (self.channel, self.die, self.plane, self.block)


@attr.s(slots=True)
class FlashOp:
    """
    One read, program or erase. Times are filled in on submission.
    """
    kind = attr.ib(type=str, validator=attr.validators.in_(FlashOpKind.ALL))
    address = attr.ib(type=FlashAddress)
    page_type = attr.ib(default=None)
    issue_time = attr.ib(default=None)
    start_time = attr.ib(default=None)
    complete_time = attr.ib(default=None)
    # Cell plus transfer time, excluding any wait for the die or channel.
    service_ns = attr.ib(default=0)
    joined = attr.ib(type=bool, default=False)
