"""
Tests for the simulated SSD pipeline.
"""
import attr
import pytest
from django.test import SimpleTestCase

from jbof_harvest.apps.core.constants import KB, MS, US
from jbof_harvest.apps.core.exceptions import InvariantViolation
from jbof_harvest.apps.flash.constants import FlashOpKind
from jbof_harvest.apps.flash.data import FlashGeometry
from test_utils.factories import SsdConfigFactory
from test_utils.utils import small_jbof

from ..constants import CommandStatus, Opcode, TranslateOutcome


class SsdDeviceTests(SimpleTestCase):
    """
    Tests for ``SsdDevice`` driven through the host.
    """

    def build(self, **changes):
        self.jbof = small_jbof(ssd_count=1, ssd_config=attr.evolve(SsdConfigFactory(), **changes))
        self.engine = self.jbof.engine
        self.device = self.jbof.devices['ssd0']
        self.done = []

    def setUp(self):
        super().setUp()
        self.build()

    def submit(self, opcode, lpn, count=1):
        cmd = self.jbof.host.new_command(opcode, 'ssd0', lpn, count=count, on_complete=self.done.append)
        self.jbof.host.submit(cmd)
        return cmd

    def programs(self):
        return self.device.flash.op_counts[FlashOpKind.PROGRAM]

    def test_partial_pages_wait_for_the_flush_delay(self):
        lpn = self.device.ftl.prefill_lpns + 3
        write = self.submit(Opcode.WRITE, lpn)
        self.engine.run_until(50 * US)
        assert self.done == [write]
        assert lpn in self.device.buffer
        assert self.programs() == 0
        self.engine.run_until(2 * MS)
        assert self.device.buffer == {}
        assert self.programs() == 1
        slot = self.device.ftl.lookup(lpn)
        assert self.device.ftl.contents[slot] == (write.token, 0)
        assert self.device.mapping.lookup(lpn) == slot
        assert self.device.write_amplification == pytest.approx(4.0)

    def test_full_pages_are_programmed_at_once(self):
        self.submit(Opcode.WRITE, 40, count=4)
        self.engine.run_until(50 * US)
        assert self.programs() == 1
        self.engine.run_until(2 * MS)
        assert self.device.buffer_free == self.device.config.write_buffer_bytes
        assert self.device.counters()['write_bytes'] == 16 * KB

    def test_writes_wait_for_buffer_space(self):
        self.build(write_buffer_bytes=8 * KB)
        writes = [self.submit(Opcode.WRITE, index * 2, count=2) for index in range(3)]
        self.engine.run_until(20 * MS)
        assert self.device.counts['parked'] > 0
        assert sorted(cmd.cmd_id for cmd in self.done) == sorted(cmd.cmd_id for cmd in writes)
        assert all(cmd.status == CommandStatus.SUCCESS for cmd in writes)
        read = self.submit(Opcode.READ, 0, count=6)
        self.engine.run_until(25 * MS)
        assert read.data == [(cmd.token, index) for cmd in writes for index in range(2)]

    def test_mapping_misses_read_the_mapping_page(self):
        self.build(warm_mapping=False)
        first = self.submit(Opcode.READ, 5)
        self.engine.run_until(1 * MS)
        second = self.submit(Opcode.READ, 6)
        self.engine.run_until(2 * MS)
        assert first.status == second.status == CommandStatus.SUCCESS
        translate = self.device.counters()['translate']
        assert translate[TranslateOutcome.LOCAL_MISS] == 1
        assert translate[TranslateOutcome.HIT] == 1
        assert self.device.flash.op_counts[FlashOpKind.READ] == 3
        assert first.latency.flash > second.latency.flash

    def test_reads_are_checked_against_the_last_write(self):
        self.device.truth[5] = ('forged', 0)
        self.submit(Opcode.READ, 5)
        with pytest.raises(InvariantViolation):
            self.engine.run_until(1 * MS)

    def test_garbage_collection_under_sustained_writes(self):
        geometry = FlashGeometry(channels=1, dies_per_channel=2, planes_per_die=1, blocks_per_plane=16, pages_per_block=4)
        self.build(geometry=geometry, write_buffer_bytes=64 * KB)
        writes = [self.submit(Opcode.WRITE, (index % 8) * 4, count=4) for index in range(120)]
        self.engine.run_until(200 * MS)
        assert all(cmd.status == CommandStatus.SUCCESS for cmd in writes)
        assert self.device.counts['gc_runs'] > 0
        assert self.device.ftl.erases > 0
        read = self.submit(Opcode.READ, 0, count=32)
        self.engine.run_until(210 * MS)
        assert read.status == CommandStatus.SUCCESS
        assert read.data == [self.device.truth[lpn] for lpn in range(32)]

    def test_snapshot(self):
        self.submit(Opcode.READ, 1)
        self.engine.run_until(1 * MS)
        snapshot = self.device.snapshot()
        assert snapshot['device'] == 'ssd0'
        assert snapshot['failed'] is False
        assert snapshot['counters']['completed'] == 1
        assert snapshot['counters']['read_bytes'] == 4 * KB
        assert snapshot['mapping']['local_regions'] == self.device.ftl.regions
        assert snapshot['utilization'] == []
