"""
Idle resource descriptors and the per-SSD tables that hold them.

A descriptor is 128 bits, packed little-endian from bit 0:

=========  ====  ==========================================================
bits       name  meaning
=========  ====  ==========================================================
0          valid       cleared by the lender to withdraw the offer
1          type        0 processor, 1 DRAM
2-9        borrower    0xFF while unclaimed
10-41      amount      processor: borrower util (high 16) ++ lender util (low 16),
                       in basis points; DRAM: lendable capacity in MB
42-105     info        processor: directory address (32) ++ borrower CQID (16)
                       ++ shadow CQID (16); DRAM: segment list address (32)
                       ++ log page base address (32)
106-127    reserved    zero
=========  ====  ==========================================================

Addresses are stored as offsets, in 4 KB units, from the first fabric region
their owner registered. The claim is a compare-and-swap on the low word, which
holds the valid, type and borrower fields.
"""
import attr

from jbof_harvest.apps.fabric.constants import RegionKind

from .constants import BASIS_POINTS, DESCRIPTOR_SIZE, DESCRIPTOR_SLOTS, UNCLAIMED, ResourceType
from .exceptions import DescriptorFieldError

ADDRESS_UNIT = 4096

_FIELDS = (
    # name, shift, width
    ('valid', 0, 1),
    ('resource_type', 1, 1),
    ('borrower_id', 2, 8),
    ('amount', 10, 32),
    ('info', 42, 64),
)
_RESERVED_SHIFT = 106
_WORD_MASK = (1 << 64) - 1


def _fits(width):
    def validator(instance, attribute, value):
        if not 0 <= int(value) < (1 << width):
            raise DescriptorFieldError(f'{attribute.name}={value} does not fit in {width} bits')
    return validator


def _basis_points(fraction):
    return max(0, min(BASIS_POINTS, int(round(fraction * BASIS_POINTS))))


@attr.s(frozen=True, slots=True)
class IdleResourceDescriptor:
    valid = attr.ib(type=int, converter=int, validator=_fits(1))
    resource_type = attr.ib(type=int, validator=_fits(1))
    borrower_id = attr.ib(type=int, default=UNCLAIMED, validator=_fits(8))
    amount = attr.ib(type=int, default=0, validator=_fits(32))
    info = attr.ib(type=int, default=0, validator=_fits(64))

    @classmethod
    def processor(cls, lender_utilization, shadow_cqid, borrower_utilization=0, directory_address=0,
                  borrower_cqid=0, borrower_id=UNCLAIMED):
        """
        A processor offer; utilizations are fractions, stored in basis points.
        """
        for name, value in (('shadow_cqid', shadow_cqid), ('borrower_cqid', borrower_cqid)):
            if not 0 <= value <= 0xFFFF:
                raise DescriptorFieldError(f'{name}={value} does not fit in 16 bits')
        if not 0 <= directory_address <= 0xFFFFFFFF:
            raise DescriptorFieldError(f'directory_address={directory_address} does not fit in 32 bits')
        return cls(
            valid=1,
            resource_type=ResourceType.PROCESSOR,
            borrower_id=borrower_id,
            amount=(_basis_points(borrower_utilization) << 16) | _basis_points(lender_utilization),
            info=(directory_address << 32) | (borrower_cqid << 16) | shadow_cqid,
        )

    @classmethod
    def dram(cls, capacity_mb, segment_list_address=0, log_page_address=0, borrower_id=UNCLAIMED):
        for name, value in (('segment_list_address', segment_list_address), ('log_page_address', log_page_address)):
            if not 0 <= value <= 0xFFFFFFFF:
                raise DescriptorFieldError(f'{name}={value} does not fit in 32 bits')
        return cls(
            valid=1,
            resource_type=ResourceType.DRAM,
            borrower_id=borrower_id,
            amount=capacity_mb,
            info=(segment_list_address << 32) | log_page_address,
        )

    # Field views

    @property
    def claimed(self):
        return self.borrower_id != UNCLAIMED

    @property
    def is_processor(self):
        return self.resource_type == ResourceType.PROCESSOR

    @property
    def borrower_utilization(self):
        return (self.amount >> 16) / BASIS_POINTS

    @property
    def lender_utilization(self):
        return (self.amount & 0xFFFF) / BASIS_POINTS

    @property
    def directory_address(self):
        return self.info >> 32

    @property
    def borrower_cqid(self):
        return (self.info >> 16) & 0xFFFF

    @property
    def shadow_cqid(self):
        return self.info & 0xFFFF

    @property
    def capacity_mb(self):
        return self.amount

    @property
    def segment_list_address(self):
        return self.info >> 32

    @property
    def log_page_address(self):
        return self.info & 0xFFFFFFFF

    def evolve(self, **changes):
        return attr.evolve(self, **changes)

    def with_utilization(self, lender=None, borrower=None):
        lender_bp = self.amount & 0xFFFF if lender is None else _basis_points(lender)
        borrower_bp = self.amount >> 16 if borrower is None else _basis_points(borrower)
        return self.evolve(amount=(borrower_bp << 16) | lender_bp)

    # Codec

    def to_int(self):
        value = 0
        for name, shift, _ in _FIELDS:
            value |= int(getattr(self, name)) << shift
        return value

    @classmethod
    def from_int(cls, value):
        if value >> _RESERVED_SHIFT:
            raise DescriptorFieldError(f'reserved descriptor bits are set in {value:#034x}')
        fields = {name: (value >> shift) & ((1 << width) - 1) for name, shift, width in _FIELDS}
        return cls(**fields)

    def encode(self):
        return self.to_int().to_bytes(DESCRIPTOR_SIZE, 'little')

    @classmethod
    def decode(cls, raw):
        if len(raw) != DESCRIPTOR_SIZE:
            raise DescriptorFieldError(f'a descriptor is {DESCRIPTOR_SIZE} bytes, got {len(raw)}')
        return cls.from_int(int.from_bytes(raw, 'little'))

    def words(self):
        value = self.to_int()
        return value & _WORD_MASK, value >> 64

    @classmethod
    def from_words(cls, low, high):
        return cls.from_int(low | (high << 64))


class DescriptorTable:
    """
    The idle resource table of one SSD, exported as fabric-attached memory.
    """

    def __init__(self, fabric, owner, slots=DESCRIPTOR_SLOTS):
        self.fabric = fabric
        self.owner = owner
        self.slots = slots
        self.region = fabric.register_region(owner, slots * DESCRIPTOR_SIZE, RegionKind.DESCRIPTOR_TABLE)

    def address(self, slot):
        if not 0 <= slot < self.slots:
            raise IndexError(f'descriptor slot {slot} outside table of {self.slots}')
        return self.region.base + slot * DESCRIPTOR_SIZE

    def read(self, slot):
        """
        Untimed read, for the owner or the host driver.
        """
        address = self.address(slot)
        return IdleResourceDescriptor.from_words(
            self.fabric.read_word(address), self.fabric.read_word(address + 8),
        )

    def fetch(self, requester, slot):
        """
        Timed read by another device; returns the descriptor and completion time.
        """
        address = self.address(slot)
        low = self.fabric.remote_read(requester, address)
        high = self.fabric.remote_read(requester, address + 8)
        return IdleResourceDescriptor.from_words(low.value, high.value), max(low.done, high.done)

    def write(self, slot, descriptor, requester=None):
        """
        Store a descriptor; a ``requester`` other than the owner pays fabric time.
        """
        address = self.address(slot)
        low, high = descriptor.words()
        requester = requester or self.owner
        self.fabric.remote_write(requester, address, value=low)
        return self.fabric.remote_write(requester, address + 8, value=high).done

    def claim(self, requester, slot, expected, borrower_id):
        """
        Compare-and-swap the borrower field of ``expected`` to ``borrower_id``.
        """
        low, _ = expected.words()
        new_low, _ = expected.evolve(borrower_id=borrower_id).words()
        return self.fabric.remote_cas(requester, self.address(slot), low, new_low).value

    def unclaim(self, requester, slot, borrower_id):
        """
        Hand a claimed descriptor back; only its current borrower may do so.
        """
        current = self.read(slot)
        if current.borrower_id != borrower_id:
            return False
        new_low, _ = current.evolve(borrower_id=UNCLAIMED).words()
        return self.fabric.remote_cas(requester, self.address(slot), current.words()[0], new_low).value

    def entries(self):
        return [(slot, self.read(slot)) for slot in range(self.slots)]

    def free_slot(self):
        """
        The invalid slot written longest ago (never-written slots first), or None.
        """
        candidates = []
        for slot, descriptor in self.entries():
            if not descriptor.valid:
                written = self.fabric.last_write(self.address(slot))
                candidates.append((-1 if written is None else written, slot))
        return min(candidates)[1] if candidates else None

    def publish(self, descriptor):
        """
        Place a fresh offer in the table; returns its slot, or None when every
        slot holds a valid descriptor (publishing is then deferred).
        """
        slot = self.free_slot()
        if slot is not None:
            self.write(slot, descriptor)
        return slot

    def withdraw(self, slot):
        self.write(slot, self.read(slot).evolve(valid=0))

    def reset(self, slot):
        """
        Make an offer claimable again (after its borrower failed).
        """
        self.write(slot, self.read(slot).evolve(valid=1, borrower_id=UNCLAIMED))

    def updated_at(self, slot):
        return self.fabric.last_write(self.address(slot))

    def encode_address(self, address):
        """
        A global address as a 32-bit offset, in 4 KB units, from the owner's first region.
        """
        base = self.fabric.regions_of(self.owner)[0].base
        return (address - base) // ADDRESS_UNIT

    def decode_address(self, owner, offset):
        return self.fabric.regions_of(owner)[0].base + offset * ADDRESS_UNIT
