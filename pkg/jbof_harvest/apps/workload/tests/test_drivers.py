"""
Tests for the workload drivers, run against a small conventional JBOF.
"""
import pytest

from jbof_harvest.apps.core.constants import KB, MS, US, Variant
from jbof_harvest.apps.scenarios.platform import build_platform
from jbof_harvest.apps.ssd.constants import CommandStatus, Opcode
from test_utils.factories import HostConfigFactory, SsdConfigFactory

from ..constants import MicrobenchKind, TraceOp
from ..data import TraceRecord
from ..drivers import MicrobenchDriver, ProfileDriver, TraceReplayDriver
from ..exceptions import WorkloadError
from ..profiles import PROFILES


@pytest.fixture
def platform():
    platform = build_platform(
        Variant.CONV, ssd_count=2, ssd_config=SsdConfigFactory(), host_config=HostConfigFactory(), seed=5,
    )
    platform.start()
    return platform


class TestMicrobenchDriver:
    """
    Tests for ``MicrobenchDriver``.
    """

    def test_keeps_exactly_iodepth_outstanding(self, platform):
        driver = MicrobenchDriver(platform.engine, platform.host, 'ssd0', MicrobenchKind.RANDOM, Opcode.READ,
                                  4 * KB, iodepth=16)
        driver.start()
        for end in (200 * US, 700 * US, 2 * MS):
            platform.engine.run_until(end)
            assert driver.outstanding == 16
        assert driver.completed > 0
        assert driver.errors == 0

    def test_depth_one_obeys_littles_law(self, platform):
        driver = MicrobenchDriver(platform.engine, platform.host, 'ssd0', MicrobenchKind.RANDOM, Opcode.READ,
                                  4 * KB, iodepth=1)
        driver.start()
        platform.engine.run_until(3 * MS)
        stats = driver.stats()
        assert stats['completed'] > 10
        assert stats['iops'] * stats['mean_latency_ns'] / 1e9 == pytest.approx(1.0, rel=0.02)

    def test_sequential_commands_advance_by_request_size(self, platform):
        driver = MicrobenchDriver(platform.engine, platform.host, 'ssd1', MicrobenchKind.SEQUENTIAL, Opcode.WRITE,
                                  64 * KB, iodepth=4)
        requests = [driver.next_request() for _ in range(3)]
        assert requests == [(Opcode.WRITE, 0, 16), (Opcode.WRITE, 16, 16), (Opcode.WRITE, 32, 16)]

    def test_stops_at_stop_time(self, platform):
        driver = MicrobenchDriver(platform.engine, platform.host, 'ssd0', MicrobenchKind.SEQUENTIAL, Opcode.READ,
                                  4 * KB, iodepth=8, stop_ns=500 * US)
        driver.start()
        platform.engine.run_until(3 * MS)
        assert driver.outstanding == 0
        issued = driver.issued
        platform.engine.run_until(4 * MS)
        assert driver.issued == issued

    def test_stops_issuing_to_a_failed_device(self, platform):
        driver = MicrobenchDriver(platform.engine, platform.host, 'ssd0', MicrobenchKind.RANDOM, Opcode.READ,
                                  4 * KB, iodepth=8)
        driver.start()
        platform.engine.run_until(1 * MS)
        platform.fail('ssd0')
        platform.engine.run_until(6 * MS)
        assert 'ssd0' in platform.host.failed_devices
        issued = driver.issued
        platform.engine.run_until(8 * MS)
        assert driver.issued == issued

    def test_size_must_be_whole_pages(self, platform):
        with pytest.raises(WorkloadError):
            MicrobenchDriver(platform.engine, platform.host, 'ssd0', MicrobenchKind.RANDOM, Opcode.READ, 6 * KB)

    def test_unknown_pattern(self, platform):
        with pytest.raises(WorkloadError):
            MicrobenchDriver(platform.engine, platform.host, 'ssd0', 'zigzag', Opcode.READ, 4 * KB)


class TestProfileDriver:
    """
    Tests for ``ProfileDriver``.
    """

    def test_mixed_profile_reads_back_what_it_wrote(self, platform):
        profile = PROFILES['MSNFS'].evolve(footprint=8 * 1024 * KB)
        driver = ProfileDriver(platform.engine, platform.host, 'ssd1', profile, iodepth=8)
        driver.start()
        # Reads are checked against the integrity oracle inside the SSD.
        platform.engine.run_until(5 * MS)
        stats = driver.stats()
        assert stats['read_bytes'] > 0
        assert stats['write_bytes'] > 0
        assert (stats['profile'], stats['source']) == ('MSNFS', 'profile-derived')
        assert driver.outstanding == 8

    def test_requests_stay_inside_the_device(self, platform):
        driver = ProfileDriver(platform.engine, platform.host, 'ssd0', PROFILES['Ali-1'], iodepth=1)
        capacity = platform.device('ssd0').user_lpns
        for _ in range(500):
            _, lpn, count = driver.next_request()
            assert 0 <= lpn and lpn + count <= capacity


class TestTraceReplayDriver:
    """
    Tests for ``TraceReplayDriver``.
    """

    def test_commands_are_never_issued_before_their_timestamp(self, platform):
        records = [
            TraceRecord(timestamp_us=index * 7.5, device='a' if index % 3 else 'b',
                        op=TraceOp.READ if index % 2 else TraceOp.WRITE, offset=index * 8 * KB, size=8 * KB)
            for index in range(200)
        ]
        driver = TraceReplayDriver(platform.engine, platform.host, records, devices={'a': 'ssd0', 'b': 'ssd1'},
                                   start_ns=100 * US)
        issues = []
        submit = platform.host.submit

        def spy(cmd):
            issues.append((platform.engine.now, cmd))
            submit(cmd)

        platform.host.submit = spy
        driver.start()
        platform.engine.run_until(5 * MS)
        assert len(issues) == 200
        for (now, cmd), record in zip(issues, records):
            assert now >= 100 * US + record.timestamp_ns
            assert cmd.device == ('ssd0' if record.device == 'a' else 'ssd1')
            assert cmd.lpn == record.offset // (4 * KB)
        assert driver.completed == 200
        assert all(cmd.status == CommandStatus.SUCCESS for _, cmd in issues)

    def test_offsets_past_the_end_wrap(self, platform):
        capacity = platform.device('ssd0').user_lpns
        records = [TraceRecord(timestamp_us=0, device='ssd0', op=TraceOp.READ, offset=capacity * 4 * KB, size=4 * KB)]
        driver = TraceReplayDriver(platform.engine, platform.host, records)
        driver.start()
        platform.engine.run_until(1 * MS)
        assert driver.wrapped == 1
        assert driver.completed == 1

    def test_unknown_devices_are_skipped(self, platform):
        records = [TraceRecord(timestamp_us=1, device='ssd9', op=TraceOp.READ, offset=0, size=4 * KB)]
        driver = TraceReplayDriver(platform.engine, platform.host, records)
        driver.start()
        platform.engine.run_until(1 * MS)
        assert driver.stats()['skipped'] == 1
        assert driver.issued == 0
