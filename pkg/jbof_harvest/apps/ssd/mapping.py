"""
The cached mapping table of one SSD.

Mapping regions (one 16 KB mapping page, 4096 entries each) are cached in a
two-level exclusive hierarchy:

* the local LRU in onboard DRAM, which holds dirty entries;
* the offsite LRU in DRAM segments harvested from lenders. A region enters it
  clean when it is evicted locally; updates made while it is offsite are
  written through the fabric and logged in the segment's redo log page, which
  stays in borrower memory.

Everything else is read from the mapping page on flash. ``persisted`` holds
the entries written back to flash on top of the initial layout.

Methods change state immediately and return ``MappingEffect``s describing the
flash and fabric traffic that the device has to time.
"""
import logging
from collections import OrderedDict

import attr

from jbof_harvest.apps.core.exceptions import InvariantViolation
from jbof_harvest.apps.harvest.redo_log import RedoLogPage

from .constants import ENTRIES_PER_MAP_PAGE, MAP_ENTRY_SIZE, MAP_PAGE_SIZE, REGIONS_PER_SEGMENT, Locator
from .constants import TranslateOutcome
from .exceptions import OffsiteSessionError

logger = logging.getLogger(__name__)


class EffectKind:
    WRITEBACK = 'writeback'
    MAP_READ = 'map-read'
    DEMOTE = 'demote'
    OFFSITE_WRITE = 'offsite-write'
    SEGMENT_FLUSH = 'segment-flush'


@attr.s(frozen=True, slots=True)
class MappingEffect:
    kind = attr.ib(type=str)
    region = attr.ib(default=None)
    address = attr.ib(default=None)
    nbytes = attr.ib(type=int, default=0)


@attr.s(slots=True)
class OffsiteSegment:
    """
    One 2 MB segment of lender DRAM holding borrower mapping regions.
    """
    lender = attr.ib(type=str)
    index = attr.ib(type=int)
    address = attr.ib(type=int)
    log = attr.ib(type=RedoLogPage)
    slots = attr.ib(factory=lambda: [None] * REGIONS_PER_SEGMENT)
    flushes = attr.ib(type=int, default=0)

    def free_slot(self):
        for index, region in enumerate(self.slots):
            if region is None:
                return index
        return None

    def slot_address(self, index, entry=0):
        return self.address + index * MAP_PAGE_SIZE + entry * MAP_ENTRY_SIZE


@attr.s(slots=True)
class OffsiteRegion:
    segment = attr.ib(type=OffsiteSegment)
    index = attr.ib(type=int)
    dirty = attr.ib(factory=dict)


class MappingState:
    """
    Mapping table cache of one SSD over its FTL.
    """

    def __init__(self, ftl, capacity_regions):
        self.ftl = ftl
        self.capacity = capacity_regions
        self.persisted = {}
        self.local = OrderedDict()
        self.offsite = OrderedDict()
        self.directory = {}
        self.segments = []
        self.sequence = 0
        self.mrc = None
        self.totals = {'accesses': 0, 'misses': 0, 'offsite_hits': 0, 'writebacks': 0, 'flushes': 0}
        self._window = [0, 0]

    # Lookups

    def region_of(self, lpn):
        return lpn // ENTRIES_PER_MAP_PAGE

    def locate(self, region):
        return self.directory.get(region, Locator.FLASH)

    def lookup(self, lpn):
        region = lpn // ENTRIES_PER_MAP_PAGE
        locator = self.directory.get(region)
        if locator == Locator.LOCAL:
            dirty = self.local[region]
        elif locator == Locator.OFFSITE:
            dirty = self.offsite[region].dirty
        else:
            dirty = None
        if dirty and lpn in dirty:
            return dirty[lpn]
        slot = self.persisted.get(lpn)
        return self.ftl.prefill_slot(lpn) if slot is None else slot

    def access(self, region):
        """
        Classify a translation of ``region`` and account for it. Local hits
        refresh recency; offsite hits are served in place.
        """
        self.totals['accesses'] += 1
        self._window[0] += 1
        if self.mrc is not None:
            self.mrc.access(region)
        locator = self.locate(region)
        if locator == Locator.LOCAL:
            self.local.move_to_end(region)
            return TranslateOutcome.HIT
        if locator == Locator.OFFSITE:
            self.totals['offsite_hits'] += 1
            self.offsite.move_to_end(region)
            return TranslateOutcome.OFFSITE_HIT
        self.totals['misses'] += 1
        self._window[1] += 1
        return TranslateOutcome.LOCAL_MISS

    def take_window(self):
        """
        (accesses, misses) since the previous call.
        """
        counts = tuple(self._window)
        self._window = [0, 0]
        return counts

    def offsite_address(self, region, lpn=0):
        entry = self.offsite[region]
        return entry.segment.slot_address(entry.index, lpn % ENTRIES_PER_MAP_PAGE)

    def offsite_lender(self, region):
        return self.offsite[region].segment.lender

    # Cache maintenance

    def warm(self):
        """
        Load regions in order until the local cache is full.
        """
        for region in range(min(self.capacity, self.ftl.regions)):
            self.local[region] = {}
            self.directory[region] = Locator.LOCAL

    def install(self, region):
        """
        Bring a region that was read from flash into the local cache.
        """
        if region in self.local:
            self.local.move_to_end(region)
            return []
        if region in self.offsite:
            return []
        self.local[region] = {}
        self.directory[region] = Locator.LOCAL
        return self._shrink()

    def set_capacity(self, capacity_regions):
        """
        Resize the local cache (DRAM lent out or reclaimed).
        """
        self.capacity = capacity_regions
        return self._shrink()

    def _shrink(self):
        effects = []
        while len(self.local) > self.capacity:
            region, dirty = self.local.popitem(last=False)
            if dirty:
                self._write_back(region, dirty, effects)
            slot = self._offsite_slot(effects)
            if slot is None:
                del self.directory[region]
                continue
            segment, index = slot
            segment.slots[index] = region
            self.offsite[region] = OffsiteRegion(segment, index)
            self.directory[region] = Locator.OFFSITE
            effects.append(MappingEffect(
                EffectKind.DEMOTE, region, segment.slot_address(index), MAP_PAGE_SIZE,
            ))
        return effects

    def _offsite_slot(self, effects):
        for segment in self.segments:
            index = segment.free_slot()
            if index is not None:
                return segment, index
        if not self.offsite:
            return None
        self._evict_offsite(next(iter(self.offsite)), effects)
        return self._offsite_slot(effects)

    def _evict_offsite(self, region, effects):
        entry = self.offsite[region]
        if entry.dirty:
            self._flush_segment(entry.segment, effects)
        del self.offsite[region]
        del self.directory[region]
        entry.segment.slots[entry.index] = None

    def _write_back(self, region, dirty, effects):
        self.persisted.update(dirty)
        dirty.clear()
        self.totals['writebacks'] += 1
        effects.append(MappingEffect(EffectKind.WRITEBACK, region))

    def _flush_segment(self, segment, effects):
        """
        Write every dirty region of a segment back to flash and clear its log.
        """
        moved = 0
        for region in segment.slots:
            if region is None:
                continue
            dirty = self.offsite[region].dirty
            if dirty:
                self._write_back(region, dirty, effects)
                moved += 1
        segment.log.clear()
        segment.flushes += 1
        self.totals['flushes'] += 1
        effects.append(MappingEffect(EffectKind.SEGMENT_FLUSH, None, segment.address, moved * MAP_PAGE_SIZE))

    # Updates

    def update(self, lpn, slot, install=True):
        """
        Record a new mapping value. A region that is not cached is installed
        locally (after a mapping page read) or, with ``install=False``, written
        through to its flash page.
        """
        region = lpn // ENTRIES_PER_MAP_PAGE
        self.sequence += 1
        effects = []
        locator = self.locate(region)
        if locator == Locator.FLASH:
            if not install:
                self.persisted[lpn] = slot
                effects.append(MappingEffect(EffectKind.WRITEBACK, region))
                return effects
            effects.append(MappingEffect(EffectKind.MAP_READ, region))
            effects.extend(self.install(region))
            locator = Locator.LOCAL
        if locator == Locator.LOCAL:
            self.local[region][lpn] = slot
            return effects
        entry = self.offsite[region]
        segment = entry.segment
        if segment.log.full:
            self._flush_segment(segment, effects)
        offset = entry.index * ENTRIES_PER_MAP_PAGE + lpn % ENTRIES_PER_MAP_PAGE
        segment.log.append(offset, slot, self.sequence)
        entry.dirty[lpn] = slot
        effects.append(MappingEffect(
            EffectKind.OFFSITE_WRITE, region, segment.slot_address(entry.index, lpn % ENTRIES_PER_MAP_PAGE),
            MAP_ENTRY_SIZE,
        ))
        return effects

    # Harvested segments

    def add_segment(self, lender, index, address):
        segment = OffsiteSegment(lender, index, address, RedoLogPage(segment_id=index))
        self.segments.append(segment)
        return segment

    def segments_of(self, lender):
        return [segment for segment in self.segments if segment.lender == lender]

    def offsite_regions(self, lender=None):
        return sum(
            1 for entry in self.offsite.values() if lender is None or entry.segment.lender == lender
        )

    def drain(self, lender):
        """
        Give back every segment borrowed from ``lender``: flush dirty regions and
        drop the cached copies.
        """
        effects = []
        for segment in self.segments_of(lender):
            self._flush_segment(segment, effects)
            for index, region in enumerate(segment.slots):
                if region is not None:
                    del self.offsite[region]
                    del self.directory[region]
                    segment.slots[index] = None
            segment.log.close()
            self.segments.remove(segment)
        return effects

    def recover(self, lender):
        """
        Rebuild the entries lost with ``lender``: replay each segment's redo log
        over the flushed mapping pages and cache the result locally.

        Returns (effects, replayed record count).
        """
        effects = []
        replayed = 0
        for segment in self.segments_of(lender):
            recovered = {}
            for record in RedoLogPage.replay(segment.log.encode()):
                index, entry = divmod(record.offset, ENTRIES_PER_MAP_PAGE)
                region = segment.slots[index]
                if region is None:
                    raise InvariantViolation(f'log record for empty slot {index} of segment {segment.index}')
                recovered.setdefault(region, {})[region * ENTRIES_PER_MAP_PAGE + entry] = record.value
                replayed += 1
            for index, region in enumerate(segment.slots):
                if region is None:
                    continue
                del self.offsite[region]
                self.local[region] = recovered.get(region, {})
                self.directory[region] = Locator.LOCAL
                segment.slots[index] = None
            segment.log.close()
            self.segments.remove(segment)
        effects.extend(self._shrink())
        logger.info('[harvest] replayed %s redo records lost with %s', replayed, lender)
        return effects, replayed

    def require_segment(self, segment):
        if segment not in self.segments:
            raise OffsiteSessionError(f'segment {segment.index} of {segment.lender} is no longer borrowed')

    # Checks

    def verify(self, lpns):
        """
        Every cached or persisted entry must agree with the FTL's live map.
        """
        for lpn in lpns:
            expected = self.ftl.lookup(lpn)
            actual = self.lookup(lpn)
            if actual != expected:
                raise InvariantViolation(f'mapping of lpn {lpn} is {actual}, live copy is at {expected}')

    def snapshot(self):
        return {
            'capacity_regions': self.capacity,
            'local_regions': len(self.local),
            'dirty_local_regions': sum(1 for dirty in self.local.values() if dirty),
            'offsite_regions': len(self.offsite),
            'borrowed_segments': len(self.segments),
            'persisted_entries': len(self.persisted),
            **self.totals,
        }
