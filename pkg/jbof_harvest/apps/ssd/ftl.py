"""
Page-mapping flash translation layer: physical allocation, validity tracking
and greedy garbage collection.

Physical pages are numbered so that consecutive numbers land on consecutive
dies; a logical page occupies one 4 KB slot of a 16 KB physical page, and a
mapping value is the slot number. Mapping pages occupy whole physical pages.

Before the run, the first pages of the array hold the mapping table (region
``r`` at physical page ``r``) followed by the prefilled logical pages in order.
That layout stays implicit; only pages written or moved afterwards are kept in
dictionaries.

``current`` is the authoritative logical-to-physical map. The cached mapping
table must always agree with it, so it doubles as the shadow oracle.
"""
import logging
from collections import Counter, deque

import attr

from jbof_harvest.apps.core.constants import LPN_SIZE
from jbof_harvest.apps.core.utils import ceil_div
from jbof_harvest.apps.flash.data import FlashAddress

from .constants import ENTRIES_PER_MAP_PAGE, UNMAPPED
from .exceptions import DeviceFullError

logger = logging.getLogger(__name__)


@attr.s(slots=True)
class GcPlan:
    """
    What one garbage-collection pass did, for the caller to time on flash and to
    propagate into the cached mapping table.
    """
    die = attr.ib(type=int)
    reads = attr.ib(factory=list)
    programs = attr.ib(factory=list)
    erases = attr.ib(factory=list)
    # (lpn, new slot) for every relocated logical page
    remaps = attr.ib(factory=list)
    # mapping regions whose page moved
    moved_regions = attr.ib(factory=list)

    @property
    def migrated_pages(self):
        return len(self.programs)


class PageMappingFtl:
    """
    Physical side of one SSD's FTL.
    """

    def __init__(self, geometry, overprovision=0.07, gc_low=0.05, gc_high=0.10, prefill=0.5):
        self.geometry = geometry
        self.slots_per_page = max(1, geometry.page_size // LPN_SIZE)
        self.dies = geometry.dies
        self.pages_per_block = geometry.pages_per_block
        self.blocks_per_die = geometry.blocks_per_die
        self.gc_low = gc_low * self.blocks_per_die
        self.gc_high = gc_high * self.blocks_per_die

        usable_pages = int(geometry.total_pages * (1 - overprovision))
        slots = self.slots_per_page
        self.map_pages = ceil_div(usable_pages * slots, ENTRIES_PER_MAP_PAGE + slots)
        self.lpn_count = (usable_pages - self.map_pages) * slots
        self.prefill_lpns = int(self.lpn_count * prefill)
        self.prefill_base = self.map_pages * slots

        self.contents = {}
        self.programs = Counter()
        self.erases = 0
        self._current = {}
        self._reverse = {}
        self._region_ppn = {}
        self._map_owner = {}
        self._valid = [[0] * self.blocks_per_die for _ in range(self.dies)]
        self._free = [deque() for _ in range(self.dies)]
        self._free_set = [set() for _ in range(self.dies)]
        self._active = [None] * self.dies
        self._pending = Counter()
        self._cursor = 0
        self._prefilled = []
        self._lay_out_prefill()

    @property
    def regions(self):
        return self.map_pages

    # Layout

    def ppn(self, die, block, page):
        return (block * self.pages_per_block + page) * self.dies + die

    def block_of(self, ppn):
        """(die, block within die) holding a physical page."""
        die = ppn % self.dies
        return die, (ppn // self.dies) // self.pages_per_block

    def address(self, ppn):
        geometry = self.geometry
        die = ppn % self.dies
        index = ppn // self.dies
        block, page = divmod(index, self.pages_per_block)
        channel, die_in_channel = divmod(die, geometry.dies_per_channel)
        block_in_plane, plane = divmod(block, geometry.planes_per_die)
        return FlashAddress(channel, die_in_channel, plane, block_in_plane, page)

    def block_address(self, die, block):
        return self.address(self.ppn(die, block, 0))

    def _lay_out_prefill(self):
        slots = self.slots_per_page
        used = self.map_pages + ceil_div(self.prefill_lpns, slots)
        ppb = self.pages_per_block
        last_short = (slots - self.prefill_lpns % slots) % slots
        for die in range(self.dies):
            count = max(0, ceil_div(used - die, self.dies))
            full, partial = divmod(count, ppb)
            written_blocks = full + (1 if partial else 0)
            for block in range(written_blocks):
                pages = ppb if block < full else partial
                self._valid[die][block] = pages * slots
                self._prefilled.append((die, block, pages))
            for block in range(written_blocks, self.blocks_per_die):
                self._free[die].append(block)
                self._free_set[die].add(block)
            if partial:
                self._active[die] = [full, partial]
        if last_short and used > self.map_pages:
            die, block = self.block_of(used - 1)
            self._valid[die][block] -= last_short

    def prefilled_blocks(self):
        """
        Yield (block address, programmed pages) for blocks written before the run.
        """
        for die, block, pages in self._prefilled:
            yield self.block_address(die, block), pages

    # Lookups

    def prefill_slot(self, lpn):
        return self.prefill_base + lpn if lpn < self.prefill_lpns else UNMAPPED

    def lookup(self, lpn):
        slot = self._current.get(lpn)
        return self.prefill_slot(lpn) if slot is None else slot

    def slot_owner(self, slot):
        """
        The logical page whose live copy sits in ``slot``, or None.
        """
        lpn = self._reverse.get(slot)
        if lpn is not None:
            return lpn
        lpn = slot - self.prefill_base
        if 0 <= lpn < self.prefill_lpns and lpn not in self._current:
            return lpn
        return None

    def map_page_ppn(self, region):
        return self._region_ppn.get(region, region)

    def map_region_at(self, ppn):
        region = self._map_owner.get(ppn)
        if region is not None:
            return region
        if ppn < self.map_pages and ppn not in self._region_ppn:
            return ppn
        return None

    def valid_slots(self, die, block):
        return self._valid[die][block]

    def free_blocks(self, die=None):
        if die is None:
            return sum(len(free) for free in self._free)
        return len(self._free[die])

    # Allocation

    def allocate(self, die=None, track=True):
        """
        Take the next page of a write point. Without ``die`` the dies are used in
        rotation. ``track`` marks the block busy until ``program_done``.
        """
        if die is None:
            die = self._next_die()
        active = self._active[die]
        if active is None or active[1] >= self.pages_per_block:
            if not self._free[die]:
                raise DeviceFullError(f'die {die} has no free block')
            block = self._free[die].popleft()
            self._free_set[die].discard(block)
            active = self._active[die] = [block, 0]
        block, page = active
        active[1] += 1
        if track:
            self._pending[(die, block)] += 1
        return self.ppn(die, block, page)

    def _next_die(self):
        for _ in range(self.dies):
            die = self._cursor
            self._cursor = (self._cursor + 1) % self.dies
            active = self._active[die]
            if self._free[die] or (active is not None and active[1] < self.pages_per_block):
                return die
        raise DeviceFullError('no die has a free page')

    def program_done(self, ppn):
        key = self.block_of(ppn)
        self._pending[key] -= 1
        if self._pending[key] <= 0:
            del self._pending[key]

    def needs_gc(self, die):
        return len(self._free[die]) < self.gc_low

    # Mapping changes

    def remap(self, lpn, slot, token=None):
        """
        Point ``lpn`` at ``slot`` and invalidate its previous slot.
        """
        old = self.lookup(lpn)
        if old != UNMAPPED:
            self._drop(old)
        self._current[lpn] = slot
        self._reverse[slot] = lpn
        if token is not None:
            self.contents[slot] = token
        die, block = self.block_of(slot // self.slots_per_page)
        self._valid[die][block] += 1
        return old

    def _drop(self, slot):
        self._reverse.pop(slot, None)
        self.contents.pop(slot, None)
        die, block = self.block_of(slot // self.slots_per_page)
        self._valid[die][block] -= 1

    def relocate_map_page(self, region, die=None):
        """
        Give a mapping region a fresh physical page (out-of-place write back).
        """
        new = self.allocate(die, track=False)
        self._move_map_page(region, self.map_page_ppn(region), new)
        self.programs['map'] += 1
        return new

    def _move_map_page(self, region, old, new):
        slots = self.slots_per_page
        self._map_owner.pop(old, None)
        self._region_ppn[region] = new
        self._map_owner[new] = region
        die, block = self.block_of(old)
        self._valid[die][block] -= slots
        die, block = self.block_of(new)
        self._valid[die][block] += slots

    # Garbage collection

    def collect(self, die):
        """
        Greedy collection on one die until the high watermark is reached.
        """
        plan = GcPlan(die)
        while len(self._free[die]) < self.gc_high:
            victim = self._victim(die)
            if victim is None:
                break
            self._relocate(die, victim, plan)
        if not plan.erases and not self._has_space(die):
            raise DeviceFullError(f'die {die} is full and has no erasable block')
        logger.debug('[gc] die %s erased %s blocks, migrated %s pages', die, len(plan.erases), len(plan.programs))
        return plan

    def _has_space(self, die):
        active = self._active[die]
        return bool(self._free[die]) or (active is not None and active[1] < self.pages_per_block)

    def _victim(self, die):
        full = self.slots_per_page * self.pages_per_block
        active = self._active[die]
        best = None
        for block in range(self.blocks_per_die):
            if block in self._free_set[die] or (die, block) in self._pending:
                continue
            if active is not None and active[0] == block:
                continue
            valid = self._valid[die][block]
            if valid < full and (best is None or valid < self._valid[die][best]):
                best = block
        return best

    def _relocate(self, die, block, plan):
        slots = self.slots_per_page
        programs_before = len(plan.programs)
        movers = []
        for page in range(self.pages_per_block):
            ppn = self.ppn(die, block, page)
            region = self.map_region_at(ppn)
            if region is not None:
                new = self.allocate(die, track=False)
                self._move_map_page(region, ppn, new)
                plan.reads.append(ppn)
                plan.programs.append(new)
                plan.moved_regions.append(region)
                continue
            live = []
            for slot in range(ppn * slots, (ppn + 1) * slots):
                lpn = self.slot_owner(slot)
                if lpn is not None:
                    live.append((lpn, slot))
            if live:
                plan.reads.append(ppn)
                movers.extend(live)
        for start in range(0, len(movers), slots):
            new = self.allocate(die, track=False)
            plan.programs.append(new)
            for offset, (lpn, old) in enumerate(movers[start:start + slots]):
                slot = new * slots + offset
                self.remap(lpn, slot, token=self.contents.get(old))
                plan.remaps.append((lpn, slot))
        self.programs['gc'] += len(plan.programs) - programs_before
        self._erase(die, block)
        plan.erases.append(self.block_address(die, block))

    def _erase(self, die, block):
        self._valid[die][block] = 0
        self._free[die].append(block)
        self._free_set[die].add(block)
        self.erases += 1
