"""
Tests for idle resource descriptors and descriptor tables.
"""
from itertools import permutations

import ddt
import pytest
from django.test import SimpleTestCase

from jbof_harvest.apps.engine.api import SimulationEngine
from jbof_harvest.apps.fabric.api import CxlFabric

from ..constants import DESCRIPTOR_SLOTS, UNCLAIMED, ResourceType
from ..descriptors import DescriptorTable, IdleResourceDescriptor
from ..exceptions import DescriptorFieldError


@ddt.ddt
class IdleResourceDescriptorTests(SimpleTestCase):
    """
    Tests for the 128-bit descriptor codec.
    """

    def test_processor_offer_fields(self):
        descriptor = IdleResourceDescriptor.processor(lender_utilization=0.2, shadow_cqid=0x101)
        assert descriptor.valid == 1
        assert descriptor.resource_type == ResourceType.PROCESSOR
        assert descriptor.borrower_id == UNCLAIMED
        assert not descriptor.claimed
        assert descriptor.lender_utilization == 0.2
        assert descriptor.borrower_utilization == 0.0
        assert descriptor.shadow_cqid == 0x101

    def test_dram_offer_amount_is_in_megabytes(self):
        descriptor = IdleResourceDescriptor.dram(capacity_mb=512, segment_list_address=7)
        assert descriptor.amount == 512
        assert descriptor.capacity_mb == 512
        assert descriptor.segment_list_address == 7
        assert descriptor.resource_type == ResourceType.DRAM

    def test_bit_positions(self):
        descriptor = IdleResourceDescriptor(valid=1, resource_type=1, borrower_id=3, amount=1, info=1)
        assert descriptor.to_int() == 1 | (1 << 1) | (3 << 2) | (1 << 10) | (1 << 42)

    @ddt.data(
        IdleResourceDescriptor.processor(0.3, 0x100, borrower_utilization=0.9, directory_address=0xABCDEF,
                                         borrower_cqid=1, borrower_id=4),
        IdleResourceDescriptor.dram(4096, segment_list_address=0xFFFFFFFF, log_page_address=12),
        IdleResourceDescriptor(valid=0, resource_type=1, borrower_id=0, amount=(1 << 32) - 1, info=(1 << 64) - 1),
    )
    def test_decode_inverts_encode(self, descriptor):
        raw = descriptor.encode()
        assert len(raw) == 16
        assert IdleResourceDescriptor.decode(raw) == descriptor
        assert IdleResourceDescriptor.from_words(*descriptor.words()) == descriptor

    def test_reserved_bits_must_be_zero(self):
        raw = (1 << 110).to_bytes(16, 'little')
        with pytest.raises(DescriptorFieldError):
            IdleResourceDescriptor.decode(raw)

    @ddt.data(
        {'borrower_id': 256},
        {'amount': 1 << 32},
        {'info': 1 << 64},
        {'valid': 2},
    )
    def test_field_widths_are_enforced(self, overrides):
        fields = {'valid': 1, 'resource_type': 0, **overrides}
        with pytest.raises(DescriptorFieldError):
            IdleResourceDescriptor(**fields)

    def test_utilization_is_stored_in_basis_points(self):
        descriptor = IdleResourceDescriptor.processor(0.1234, 0x100).with_utilization(borrower=0.5)
        assert descriptor.amount & 0xFFFF == 1234
        assert descriptor.amount >> 16 == 5000


class TestDescriptorTable:
    """
    Tests for ``DescriptorTable`` over the fabric.
    """

    @pytest.fixture
    def fabric(self):
        return CxlFabric(SimulationEngine(seed=0))

    @pytest.fixture
    def table(self, fabric):
        return DescriptorTable(fabric, 'ssd0')

    def test_publish_makes_offer_visible_to_peers(self, table):
        slot = table.publish(IdleResourceDescriptor.processor(0.1, 0x100))
        descriptor, done = table.fetch('ssd1', slot)
        assert descriptor.valid and not descriptor.claimed
        assert descriptor.shadow_cqid == 0x100
        assert done > 0

    def test_full_table_defers_publishing(self, table):
        slots = [table.publish(IdleResourceDescriptor.dram(2)) for _ in range(DESCRIPTOR_SLOTS)]
        assert sorted(slots) == list(range(DESCRIPTOR_SLOTS))
        assert table.publish(IdleResourceDescriptor.dram(2)) is None

    def test_oldest_invalid_slot_is_reused(self, fabric, table):
        for _ in range(DESCRIPTOR_SLOTS):
            table.publish(IdleResourceDescriptor.dram(2))
        fabric.engine.now = 10
        table.withdraw(5)
        fabric.engine.now = 20
        table.withdraw(2)
        assert table.publish(IdleResourceDescriptor.dram(4)) == 5

    def test_claim_is_a_compare_and_swap(self, table):
        slot = table.publish(IdleResourceDescriptor.processor(0.1, 0x100))
        seen = table.read(slot)
        assert table.claim('ssd1', slot, seen, borrower_id=1)
        assert table.read(slot).borrower_id == 1
        assert not table.claim('ssd2', slot, seen, borrower_id=2)
        assert table.read(slot).borrower_id == 1

    def test_withdraw_mid_search_defeats_the_claim(self, table):
        slot = table.publish(IdleResourceDescriptor.processor(0.1, 0x100))
        seen = table.read(slot)
        table.withdraw(slot)
        assert not table.claim('ssd1', slot, seen, borrower_id=1)
        assert table.read(slot).borrower_id == UNCLAIMED

    def test_only_the_borrower_unclaims(self, table):
        slot = table.publish(IdleResourceDescriptor.dram(2))
        table.claim('ssd1', slot, table.read(slot), borrower_id=1)
        assert not table.unclaim('ssd2', slot, borrower_id=2)
        assert table.unclaim('ssd1', slot, borrower_id=1)
        assert not table.read(slot).claimed

    def test_reset_makes_offer_claimable_again(self, table):
        slot = table.publish(IdleResourceDescriptor.dram(2))
        table.claim('ssd1', slot, table.read(slot), borrower_id=1)
        table.reset(slot)
        descriptor = table.read(slot)
        assert descriptor.valid == 1
        assert descriptor.borrower_id == UNCLAIMED

    @pytest.mark.parametrize('claimants', [2, 3])
    @pytest.mark.parametrize('offers', [1, 2])
    def test_every_interleaving_claims_each_offer_at_most_once(self, fabric, claimants, offers):
        """
        Each claimant reads every offer, then tries them in its own order. All
        orders of the claimants' compare-and-swap steps are tried.
        """
        steps = [(claimant, slot) for claimant in range(claimants) for slot in range(offers)]
        for order in permutations(steps):
            table = DescriptorTable(fabric, f'lender-{id(order)}')
            for _ in range(offers):
                table.publish(IdleResourceDescriptor.processor(0.1, 0x100))
            seen = {slot: table.read(slot) for slot in range(offers)}
            sessions = {}
            holding = set()
            for claimant, slot in order:
                if claimant in holding:
                    continue
                if table.claim(f'ssd{claimant}', slot, seen[slot], borrower_id=claimant):
                    sessions.setdefault(slot, []).append(claimant)
                    holding.add(claimant)
            assert all(len(winners) == 1 for winners in sessions.values())
            assert len(sessions) <= offers
