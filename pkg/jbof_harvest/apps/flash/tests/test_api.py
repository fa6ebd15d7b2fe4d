"""
Tests for the flash backbone.
"""
import ddt
import pytest
from django.test import SimpleTestCase

from jbof_harvest.apps.engine.api import SimulationEngine

from ..api import FlashBackbone
from ..constants import FlashOpKind, PageType, TimingUnit
from ..data import FlashAddress, FlashGeometry, FlashOp, FlashTiming
from ..exceptions import FlashAddressError, ProgramError, UtilizationWindowError


def read(channel=0, die=0, plane=0, block=0, page=0):
    return FlashOp(FlashOpKind.READ, FlashAddress(channel, die, plane, block, page))


def program(channel=0, die=0, plane=0, block=0, page=0):
    return FlashOp(FlashOpKind.PROGRAM, FlashAddress(channel, die, plane, block, page))


def erase(channel=0, die=0, plane=0, block=0):
    return FlashOp(FlashOpKind.ERASE, FlashAddress(channel, die, plane, block))


@ddt.ddt
class FlashBackboneTests(SimpleTestCase):
    """
    Tests for ``FlashBackbone.submit``.
    """

    def setUp(self):
        super().setUp()
        self.engine = SimulationEngine(seed=0)
        self.flash = FlashBackbone(self.engine)

    def test_default_geometry_is_four_terabytes(self):
        assert self.flash.geometry.capacity_bytes == 4 * 1024 ** 4
        assert self.flash.geometry.transfer_ns == 6_827

    def test_lsb_read_on_idle_die(self):
        op = read(page=0)
        done = self.flash.submit(op)
        assert done == 30_000 + 6_827
        assert op.page_type == PageType.LSB
        assert op.complete_time > op.issue_time

    @ddt.data(
        (0, 30_000),
        (1, 45_000),
        (2, 60_000),
        (3, 30_000),
    )
    @ddt.unpack
    def test_page_type_cycles_by_index(self, page, cell):
        assert self.flash.submit(read(page=page)) == cell + 6_827

    def test_erase_holds_die_for_three_ms(self):
        done = self.flash.submit(erase(block=7))
        assert done == 3_000_000
        assert self.flash.dies[0].busy_ns == 3_000_000
        assert self.flash.channels[0].busy_ns == 0

    def test_same_die_reads_serialize(self):
        first = read(block=0)
        second = read(block=1)
        self.flash.submit(first)
        done = self.flash.submit(second)
        assert second.start_time >= first.start_time + 30_000
        assert done >= 30_000 + 30_000
        assert done == 36_827 + 30_000 + 6_827

    def test_reads_on_different_channels_overlap(self):
        assert self.flash.submit(read(channel=0)) == self.flash.submit(read(channel=1))

    def test_program_then_reprogram_faults(self):
        done = self.flash.submit(program(page=0))
        assert done == 6_827 + 200_000
        with pytest.raises(ProgramError):
            self.flash.submit(program(page=0))

    def test_erase_allows_programming_again(self):
        self.flash.submit(program(page=0))
        self.flash.submit(erase())
        self.flash.submit(program(page=0))
        assert self.flash.op_counts[FlashOpKind.PROGRAM] == 2

    def test_prefilled_block_rejects_programs_below_high_water(self):
        self.flash.mark_programmed((0, 0, 0, 3), 10)
        with pytest.raises(ProgramError):
            self.flash.submit(program(block=3, page=9))
        self.flash.submit(program(block=3, page=10))

    @ddt.data(
        FlashAddress(8, 0, 0, 0, 0),
        FlashAddress(0, 8, 0, 0, 0),
        FlashAddress(0, 0, 4, 0, 0),
        FlashAddress(0, 0, 0, 1024, 0),
        FlashAddress(0, 0, 0, 0, 1024),
        FlashAddress(-1, 0, 0, 0, 0),
    )
    def test_out_of_range_address_faults(self, address):
        with pytest.raises(FlashAddressError):
            self.flash.submit(FlashOp(FlashOpKind.READ, address))

    def test_multi_plane_reads_share_cell_time(self):
        first = read(plane=0, block=5, page=3)
        second = read(plane=1, block=5, page=3)
        self.flash.submit(first)
        done = self.flash.submit(second)
        assert second.joined
        # Cell phase is shared; only the second page transfer queues on the channel.
        assert done == 30_000 + 2 * 6_827
        assert self.flash.cell_ns[FlashOpKind.READ] == 30_000
        assert self.flash.dies[0].busy_ns == 30_000 + 2 * 6_827

    def test_programs_are_not_joined(self):
        self.flash.submit(program(plane=0, page=0))
        second = program(plane=1, page=0)
        self.flash.submit(second)
        assert not second.joined

    def test_earliest_delays_start(self):
        op = read()
        assert self.flash.submit(op, earliest=1_000) == 1_000 + 36_827
        assert op.start_time == 1_000


class TestUtilizationWindow:
    """
    Tests for ``FlashBackbone.utilization_window``.
    """

    @pytest.fixture
    def engine(self):
        return SimulationEngine(seed=0)

    def test_no_ops_is_zero(self, engine):
        flash = FlashBackbone(engine)
        engine.run_until(10 ** 6)
        assert flash.utilization_window(0, 10 ** 6) == 0.0

    def test_one_saturated_die_of_sixty_four(self, engine):
        flash = FlashBackbone(engine)
        flash.submit(erase())
        engine.run_until(10 ** 6)
        assert flash.utilization_window(0, 10 ** 6) == pytest.approx(1 / 64)

    def test_empty_window_is_an_error(self, engine):
        flash = FlashBackbone(engine)
        engine.run_until(100)
        with pytest.raises(UtilizationWindowError):
            flash.utilization_window(50, 50)

    def test_window_in_the_future_is_an_error(self, engine):
        flash = FlashBackbone(engine)
        with pytest.raises(UtilizationWindowError):
            flash.utilization_window(0, 10)

    def test_small_geometry(self, engine):
        flash = FlashBackbone(engine, FlashGeometry(channels=1, dies_per_channel=2))
        flash.submit(read(die=0))
        engine.run_until(36_827)
        assert flash.utilization_window(0, 36_827) == pytest.approx(0.5)


class TestFlashTiming:
    """
    Tests for ``FlashTiming``.
    """

    def test_msb_read_in_microseconds_by_default(self):
        assert FlashTiming().read(PageType.MSB) == 60_000

    def test_msb_literal_milliseconds(self):
        timing = FlashTiming(msb_unit=TimingUnit.MILLISECONDS)
        assert timing.read(PageType.MSB) == 60_000_000
        assert timing.program(PageType.MSB) == 400_000_000
        assert timing.read(PageType.LSB) == 30_000

    def test_ordering_is_validated(self):
        with pytest.raises(ValueError):
            FlashTiming(read_ns=(300_000, 45_000, 60_000))
