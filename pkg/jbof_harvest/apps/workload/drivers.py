"""
Workload drivers: engine actors that turn request streams into host commands.

* ``MicrobenchDriver``: fio-style closed loop keeping exactly ``iodepth``
  commands outstanding on one SSD.
* ``ProfileDriver``: closed loop whose requests are drawn from a profile.
* ``TraceReplayDriver``: open loop issuing each record at its timestamp.

Drivers stop issuing to an SSD the host has declared failed.
"""
import logging

from jbof_harvest.apps.core.constants import LPN_SIZE
from jbof_harvest.apps.core.utils import ceil_div
from jbof_harvest.apps.ssd.constants import CommandStatus, Opcode

from .constants import DEFAULT_IODEPTH, PROFILE_SOURCE, MicrobenchKind, TraceOp
from .exceptions import WorkloadError
from .traces import RequestSampler

logger = logging.getLogger(__name__)


class WorkloadDriver:
    """
    Common bookkeeping of the drivers. ``start_ns`` and ``stop_ns`` bound when
    new commands are issued; commands in flight at ``stop_ns`` still complete.
    """
    kind = 'workload'

    def __init__(self, engine, host, name, start_ns=0, stop_ns=None):
        self.engine = engine
        self.host = host
        self.id = f'workload.{name}'
        self.name = name
        self.start_ns = start_ns
        self.stop_ns = stop_ns
        self.stopped = False
        self.issued = 0
        self.completed = 0
        self.errors = 0
        self.wrapped = 0
        self.bytes = {Opcode.READ: 0, Opcode.WRITE: 0}
        self.latency_ns = 0
        self.first_issue = None
        self.last_complete = None
        engine.register(self.id, self)

    def __repr__(self):
        return f'<{type(self).__name__} {self.name}>'

    def start(self):
        self.engine.schedule_at(max(self.start_ns, self.engine.now), self.id, 'start')

    def on_start(self):
        raise NotImplementedError

    def stop(self):
        self.stopped = True

    @property
    def outstanding(self):
        return self.issued - self.completed

    def accepting(self, device_id):
        if self.stopped:
            return False
        if self.stop_ns is not None and self.engine.now >= self.stop_ns:
            return False
        return device_id not in self.host.failed_devices

    def address(self, device_id, offset, size):
        """
        First logical page and page count of a byte range, wrapped into the
        SSD's user space when it runs past the end.
        """
        capacity = self.host.devices[device_id].user_lpns
        count = min(max(1, ceil_div(size, LPN_SIZE)), capacity)
        lpn = offset // LPN_SIZE
        if lpn + count > capacity:
            if not self.wrapped:
                logger.warning(
                    '[workload] %s: request at byte %s runs past %s pages of %s, wrapping',
                    self.name, offset, capacity, device_id,
                )
            self.wrapped += 1
            lpn %= capacity - count + 1
        return lpn, count

    def issue(self, opcode, device_id, lpn, count):
        cmd = self.host.new_command(opcode, device_id, lpn, count, on_complete=self._completed)
        self.issued += 1
        if self.first_issue is None:
            self.first_issue = self.engine.now
        self.host.submit(cmd)
        return cmd

    def _completed(self, cmd):
        self.completed += 1
        self.last_complete = self.engine.now
        if cmd.status == CommandStatus.ERROR:
            self.errors += 1
        else:
            self.bytes[cmd.opcode] += cmd.nbytes
            self.latency_ns += cmd.complete_time - cmd.submit_time
        self.on_completed(cmd)

    def on_completed(self, cmd):
        """
        Hook run after each completion.
        """

    def stats(self):
        done = self.completed - self.errors
        elapsed = (self.last_complete or 0) - (self.first_issue or 0)
        return {
            'driver': self.name,
            'kind': self.kind,
            'issued': self.issued,
            'completed': self.completed,
            'errors': self.errors,
            'wrapped': self.wrapped,
            'read_bytes': self.bytes[Opcode.READ],
            'write_bytes': self.bytes[Opcode.WRITE],
            'mean_latency_ns': self.latency_ns / done if done else 0.0,
            'iops': done * 1e9 / elapsed if elapsed > 0 else 0.0,
        }


class ClosedLoopDriver(WorkloadDriver):
    """
    Keeps ``iodepth`` commands outstanding on one SSD: every completion issues
    the next request.
    """

    def __init__(self, engine, host, device_id, iodepth=DEFAULT_IODEPTH, name=None, **kwargs):
        if iodepth < 1:
            raise WorkloadError(f'iodepth must be at least 1, got {iodepth}')
        super().__init__(engine, host, name or device_id, **kwargs)
        self.device_id = device_id
        self.iodepth = iodepth

    def on_start(self):
        for _ in range(self.iodepth):
            self._issue_next()

    def on_completed(self, cmd):
        self._issue_next()

    def _issue_next(self):
        if not self.accepting(self.device_id):
            return
        opcode, lpn, count = self.next_request()
        self.issue(opcode, self.device_id, lpn, count)

    def next_request(self):
        """(opcode, lpn, count) of the next command."""
        raise NotImplementedError


class MicrobenchDriver(ClosedLoopDriver):
    """
    Fixed-size sequential or random reads or writes, like an fio job.
    """
    kind = 'microbench'

    def __init__(self, engine, host, device_id, pattern, opcode, size, iodepth=DEFAULT_IODEPTH, **kwargs):
        if pattern not in MicrobenchKind.ALL:
            raise WorkloadError(f'unknown microbenchmark pattern {pattern!r}')
        if opcode not in Opcode.ALL:
            raise WorkloadError(f'unknown opcode {opcode!r}')
        if size <= 0 or size % LPN_SIZE:
            raise WorkloadError(f'size must be a positive multiple of {LPN_SIZE} bytes, got {size}')
        super().__init__(engine, host, device_id, iodepth=iodepth, **kwargs)
        self.pattern = pattern
        self.opcode = opcode
        self.count = size // LPN_SIZE
        self._cursor = 0
        self._rng = engine.rng.stream(f'workload.{self.name}')

    def next_request(self):
        capacity = self.host.devices[self.device_id].user_lpns
        blocks = max(1, capacity // self.count)
        if self.pattern == MicrobenchKind.SEQUENTIAL:
            block = self._cursor % blocks
            self._cursor += 1
        else:
            block = int(self._rng.integers(0, blocks))
        return self.opcode, block * self.count, min(self.count, capacity)


class ProfileDriver(ClosedLoopDriver):
    """
    Closed loop over requests drawn from a ``SyntheticProfile``.
    """
    kind = 'profile'

    def __init__(self, engine, host, device_id, profile, iodepth=DEFAULT_IODEPTH, **kwargs):
        super().__init__(engine, host, device_id, iodepth=iodepth, **kwargs)
        self.profile = profile
        capacity = host.devices[device_id].user_lpns * LPN_SIZE
        self.sampler = RequestSampler(profile, engine.rng.stream(f'workload.{self.name}'), capacity=capacity)

    def next_request(self):
        op, offset, size = self.sampler.next_request()
        lpn, count = self.address(self.device_id, offset, size)
        return (Opcode.READ if op == TraceOp.READ else Opcode.WRITE), lpn, count

    def stats(self):
        stats = super().stats()
        stats['profile'] = self.profile.name
        stats['source'] = PROFILE_SOURCE
        return stats


class TraceReplayDriver(WorkloadDriver):
    """
    Open-loop replay: record k is submitted at ``start_ns`` plus its timestamp,
    never earlier, whatever is still outstanding. ``devices`` renames trace
    device ids to platform SSD ids; records of unknown devices are skipped.
    """
    kind = 'trace'

    def __init__(self, engine, host, records, devices=None, name='trace', **kwargs):
        super().__init__(engine, host, name, **kwargs)
        self.devices = dict(devices or {})
        self.skipped = 0
        self.lateness_ns = 0
        self._records = iter(records)
        self._next = None

    def on_start(self):
        self._schedule_next()

    def _schedule_next(self):
        self._next = next(self._records, None)
        if self._next is None:
            logger.info('[workload] %s replayed %s records', self.name, self.issued)
            return
        due = self.start_ns + self._next.timestamp_ns
        if self.stop_ns is not None and due >= self.stop_ns:
            return
        self.engine.schedule_at(max(due, self.engine.now), self.id, 'issue', self._next, due)

    def on_issue(self, record, due):
        self.lateness_ns = max(self.lateness_ns, self.engine.now - due)
        device_id = self.devices.get(record.device, record.device)
        if device_id not in self.host.devices:
            self.skipped += 1
            logger.debug('[workload] %s: no SSD %s, record skipped', self.name, device_id)
        elif self.accepting(device_id):
            lpn, count = self.address(device_id, record.offset, record.size)
            opcode = Opcode.READ if record.is_read else Opcode.WRITE
            self.issue(opcode, device_id, lpn, count)
        if not self.stopped:
            self._schedule_next()

    def stats(self):
        stats = super().stats()
        stats['skipped'] = self.skipped
        return stats
