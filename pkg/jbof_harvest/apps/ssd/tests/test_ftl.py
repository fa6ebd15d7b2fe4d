"""
Tests for the page-mapping FTL.
"""
import pytest
from django.test import SimpleTestCase

from jbof_harvest.apps.core.utils import ceil_div
from jbof_harvest.apps.flash.data import FlashGeometry
from test_utils.factories import FlashGeometryFactory

from ..constants import ENTRIES_PER_MAP_PAGE, UNMAPPED
from ..exceptions import DeviceFullError
from ..ftl import PageMappingFtl

# One die of 16 blocks of 4 pages.
TINY = FlashGeometry(channels=1, dies_per_channel=1, planes_per_die=1, blocks_per_plane=16, pages_per_block=4)


def write_page(ftl, lpns, token):
    ppn = ftl.allocate()
    for offset, lpn in enumerate(lpns):
        ftl.remap(lpn, ppn * ftl.slots_per_page + offset, token=(token, lpn))
    ftl.program_done(ppn)
    return ppn


class LayoutTests(SimpleTestCase):
    """
    Tests for the initial layout of the logical and physical space.
    """

    def setUp(self):
        super().setUp()
        self.ftl = PageMappingFtl(FlashGeometryFactory(), prefill=0.5)

    def test_mapping_table_covers_the_logical_space(self):
        ftl = self.ftl
        assert ftl.slots_per_page == 4
        assert ftl.regions * ENTRIES_PER_MAP_PAGE >= ftl.lpn_count
        assert ftl.prefill_lpns == ftl.lpn_count // 2
        assert ftl.prefill_base == ftl.map_pages * ftl.slots_per_page

    def test_prefilled_pages_sit_after_the_mapping_table(self):
        ftl = self.ftl
        assert ftl.lookup(0) == ftl.prefill_base
        assert ftl.lookup(ftl.prefill_lpns - 1) == ftl.prefill_base + ftl.prefill_lpns - 1
        assert ftl.lookup(ftl.prefill_lpns) == UNMAPPED
        assert ftl.slot_owner(ftl.prefill_base + 5) == 5
        assert ftl.map_page_ppn(3) == 3
        assert ftl.map_region_at(3) == 3

    def test_prefilled_blocks_are_not_free(self):
        ftl = self.ftl
        written = sum(pages for _, pages in ftl.prefilled_blocks())
        assert written == ftl.map_pages + ceil_div(ftl.prefill_lpns, ftl.slots_per_page)
        assert ftl.free_blocks() < ftl.dies * ftl.blocks_per_die

    def test_consecutive_pages_stripe_over_dies(self):
        ftl = self.ftl
        assert [ftl.block_of(ppn)[0] for ppn in range(6)] == [0, 1, 2, 3, 0, 1]
        address = ftl.address(ftl.ppn(3, 2, 1))
        assert (address.channel, address.die, address.block, address.page) == (1, 1, 2, 1)

    def test_allocation_rotates_over_dies(self):
        ftl = self.ftl
        assert [ftl.allocate() % ftl.dies for _ in range(8)] == [0, 1, 2, 3, 0, 1, 2, 3]


class RemapTests(SimpleTestCase):
    """
    Tests for mapping changes and validity tracking.
    """

    def test_remap_moves_validity(self):
        ftl = PageMappingFtl(TINY, prefill=0.5)
        old = ftl.lookup(2)
        old_block = ftl.block_of(old // ftl.slots_per_page)
        before = ftl.valid_slots(*old_block)
        total = sum(ftl.valid_slots(0, block) for block in range(ftl.blocks_per_die))
        ppn = write_page(ftl, [2], 'a')
        assert ftl.lookup(2) == ppn * ftl.slots_per_page
        assert ftl.valid_slots(*old_block) == before - 1
        assert sum(ftl.valid_slots(0, block) for block in range(ftl.blocks_per_die)) == total
        assert ftl.contents[ftl.lookup(2)] == ('a', 2)
        assert ftl.slot_owner(old) is None

    def test_rewriting_drops_the_old_contents(self):
        ftl = PageMappingFtl(TINY, prefill=0.0)
        first = write_page(ftl, [7], 'a')
        write_page(ftl, [7], 'b')
        assert first * ftl.slots_per_page not in ftl.contents
        assert ftl.contents[ftl.lookup(7)] == ('b', 7)

    def test_mapping_pages_are_written_out_of_place(self):
        ftl = PageMappingFtl(TINY, prefill=0.0)
        new = ftl.relocate_map_page(0)
        assert ftl.map_page_ppn(0) == new
        assert ftl.map_region_at(new) == 0
        assert ftl.map_region_at(0) is None
        assert ftl.programs['map'] == 1


class GarbageCollectionTests(SimpleTestCase):
    """
    Tests for greedy garbage collection.
    """

    def test_sustained_overwrites_keep_every_page_readable(self):
        ftl = PageMappingFtl(TINY, prefill=0.0)
        cold = list(range(100, 104))
        write_page(ftl, cold, 'cold')
        latest = {lpn: ('cold', lpn) for lpn in cold}
        plans = []
        for round_ in range(300):
            for start in (0, 4):
                if ftl.needs_gc(0):
                    plans.append(ftl.collect(0))
                lpns = list(range(start, start + 4))
                write_page(ftl, lpns, round_)
                latest.update({lpn: (round_, lpn) for lpn in lpns})
        assert plans
        assert ftl.erases == sum(len(plan.erases) for plan in plans)
        for lpn, token in latest.items():
            assert ftl.contents[ftl.lookup(lpn)] == token
            assert ftl.slot_owner(ftl.lookup(lpn)) == lpn

    def test_collection_restores_the_high_watermark(self):
        ftl = PageMappingFtl(TINY, prefill=0.0)
        while not ftl.needs_gc(0):
            write_page(ftl, [0, 1, 2, 3], 'x')
        plan = ftl.collect(0)
        assert ftl.free_blocks(0) >= ftl.gc_high
        assert plan.erases
        for lpn, slot in plan.remaps:
            assert ftl.lookup(lpn) == slot

    def test_full_device(self):
        ftl = PageMappingFtl(TINY, prefill=1.0)
        with pytest.raises(DeviceFullError):
            for _ in range(TINY.total_pages):
                ftl.allocate()
