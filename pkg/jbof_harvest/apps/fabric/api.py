"""
The CXL fabric: one flat, coherent global address space over device DRAM.

Coherence is modeled as serialized access at the owner: each access applies
its effect when it is issued, in dispatch order, and the requester sees the
response after one round trip plus flit serialization on both device links.
"""
import logging
from bisect import bisect_right
from collections import Counter

from jbof_harvest.apps.core.utils import ceil_div, transfer_ns
from jbof_harvest.apps.engine.stations import Calendar

from .constants import REGION_ALIGNMENT, WORD_SIZE
from .data import FabricAccess, FabricConfig, GfamRegion
from .exceptions import FabricFault
from .locks import LockTable

logger = logging.getLogger(__name__)

MASK_64 = (1 << 64) - 1


class CxlFabric:
    """
    Global fabric-attached memory with timed reads, writes and compare-and-swap.
    """

    def __init__(self, engine, config=None, keep_lock_log=False):
        self.engine = engine
        self.config = config or FabricConfig()
        self.locks = LockTable(engine, self.config.round_trip_ns, keep_log=keep_lock_log)
        self.link_bytes = Counter()
        self.accesses = Counter()
        self._links = {}
        self._regions = []
        self._bases = []
        self._next_base = REGION_ALIGNMENT
        self._words = {}
        self._written_at = {}

    # Regions

    def register_region(self, owner, length, kind):
        """
        Export ``length`` bytes of ``owner``'s DRAM into the global space.
        """
        if length <= 0:
            raise FabricFault(f'region of {owner} must have a positive length, got {length}')
        base = self._next_base
        self._next_base = base + ceil_div(length, REGION_ALIGNMENT) * REGION_ALIGNMENT
        region = GfamRegion(owner=owner, base=base, length=length, kind=kind)
        self._regions.append(region)
        self._bases.append(base)
        logger.debug('[fabric] %s registered %s bytes of %s at %#x', owner, length, kind, base)
        return region

    def region_at(self, address, length=1):
        i = bisect_right(self._bases, address) - 1
        if i < 0 or not self._regions[i].contains(address, length):
            raise FabricFault(f'address {address:#x} (+{length}) is not in a registered region')
        return self._regions[i]

    def regions_of(self, owner, kind=None):
        return [r for r in self._regions if r.owner == owner and (kind is None or r.kind == kind)]

    # Untimed word view, used by an owner on its own memory and by recovery.

    def read_word(self, address):
        self._check_word(address)
        return self._words.get(address, 0)

    def write_word(self, address, value):
        self._check_word(address)
        self._words[address] = value & MASK_64
        self._written_at[address] = self.engine.now

    def last_write(self, address):
        """
        When the word at ``address`` was last written, or None.
        """
        return self._written_at.get(address)

    def clear(self, region):
        """
        Zero a whole region (a lender recycling lent memory).
        """
        for address in [a for a in self._words if region.contains(a)]:
            del self._words[address]

    # Timed accesses

    def access_done(self, requester, address, length):
        """
        Completion time of an access of ``length`` bytes by ``requester``.
        """
        region = self.region_at(address, length)
        self.accesses[requester] += 1
        now = self.engine.now
        if region.owner == requester:
            return now + self.config.local_access_ns
        wire = ceil_div(length, self.config.flit_size) * self.config.flit_size
        serialization = transfer_ns(wire, self.config.bandwidth)
        end = 0
        for device in (requester, region.owner):
            start = self._link(device).reserve(now, now, serialization)
            end = max(end, start + serialization)
            self.link_bytes[device] += wire
        return end + self.config.round_trip_ns

    def remote_read(self, requester, address, length=WORD_SIZE):
        done = self.access_done(requester, address, length)
        value = self._words.get(address, 0) if length == WORD_SIZE else None
        return FabricAccess(value=value, done=done)

    def remote_write(self, requester, address, length=WORD_SIZE, value=None):
        done = self.access_done(requester, address, length)
        if value is not None:
            self.write_word(address, value)
        return FabricAccess(value=None, done=done)

    def remote_cas(self, requester, address, expected, new):
        """
        Atomically replace the word at ``address`` with ``new`` if it equals
        ``expected``. The value reports whether the swap happened.
        """
        self._check_word(address)
        done = self.access_done(requester, address, WORD_SIZE)
        success = self._words.get(address, 0) == expected
        if success:
            self.write_word(address, new)
        return FabricAccess(value=success, done=done)

    def transfer(self, requester, address, length):
        """
        Bulk move (segment flush, mapping page copy); returns the completion time.
        """
        return self.access_done(requester, address, length)

    def link_busy_ns(self):
        return {device: link.busy_ns for device, link in sorted(self._links.items())}

    def _link(self, device):
        link = self._links.get(device)
        if link is None:
            link = self._links[device] = Calendar()
        return link

    def _check_word(self, address):
        if address % WORD_SIZE:
            raise FabricFault(f'address {address:#x} is not {WORD_SIZE}-byte aligned')
        self.region_at(address, WORD_SIZE)
