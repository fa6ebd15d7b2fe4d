"""
Host-side baselines: virtual harvesting groups and open-channel SSDs.
"""
import logging
from collections import Counter, deque

from jbof_harvest.apps.core.constants import HOST_ID
from jbof_harvest.apps.ssd.constants import WINDOW_NS, CommandStatus, Opcode

from .constants import BURST_WINDOWS, GroupState
from .data import VirtualSsdGroup

logger = logging.getLogger(__name__)

VH_ACTOR_ID = f'{HOST_ID}.vh'
COPYBACK_RUN = 16
COPYBACK_INFLIGHT = 32


class VirtualHarvesting:
    """
    Groups a bursty SSD with idle ones and spreads its writes over the group.

    Redirected writes land in a staging area at the top of each lender's logical
    space; reads of those pages are served from the lender. When the burst ends
    the group is reclaimed: every redirected page is copied back to the
    borrower before the lenders are released, unless ``ideal`` is set, in which
    case the pages stay where they are.
    """

    def __init__(self, host, ideal=False, watermark=0.75, window_ns=WINDOW_NS, max_lenders=4):
        self.host = host
        self.engine = host.engine
        self.ideal = ideal
        self.watermark = watermark
        self.window_ns = window_ns
        self.max_lenders = max_lenders
        self.failed = False
        self.groups = {}
        self.released = []
        self.lending = {}
        self.extents = {}
        self.counts = Counter()
        self._burst = Counter()
        self._generation = 0
        self._copying = set()
        self._blocked = deque()
        self._copy_queue = {}
        host.vh = self
        self.engine.register(VH_ACTOR_ID, self)
        for device in host.devices.values():
            device.reserved_lpns = host.config.vh_staging_pages

    def start(self):
        self.engine.schedule(self.window_ns, VH_ACTOR_ID, 'window')

    def staging_base(self, lender):
        return self.host.devices[lender].ftl.lpn_count - self.host.config.vh_staging_pages

    # Group life cycle

    def _busy(self, sample):
        return sample.processor >= self.watermark or sample.flash >= self.watermark

    def on_window(self):
        self.engine.schedule(self.window_ns, VH_ACTOR_ID, 'window')
        samples = {
            device_id: device.monitor.sample()
            for device_id, device in self.host.devices.items() if not device.failed
        }
        for device_id, sample in samples.items():
            self._burst[device_id] = self._burst[device_id] + 1 if self._busy(sample) else 0
        for device_id, sample in samples.items():
            group = self.groups.get(device_id)
            if group is None:
                if self._burst[device_id] >= BURST_WINDOWS and device_id not in self.lending:
                    self._form(device_id, samples)
            elif group.state == GroupState.ACTIVE:
                group.calm_windows = 0 if self._busy(sample) else group.calm_windows + 1
                if group.calm_windows >= BURST_WINDOWS:
                    self.reclaim(group)

    def _form(self, borrower, samples):
        idle = sorted(
            (sample.processor, device_id) for device_id, sample in samples.items()
            if device_id != borrower and not self._busy(sample)
            and device_id not in self.groups and device_id not in self.lending
        )
        lenders = [device_id for _, device_id in idle[:self.max_lenders]]
        if not lenders:
            return None
        group = VirtualSsdGroup(borrower=borrower, lenders=lenders)
        for lender in lenders:
            self.lending[lender] = borrower
            group.staging_next.setdefault(lender, 0)
        self.groups[borrower] = group
        self.extents.setdefault(borrower, {})
        self.counts['groups'] += 1
        logger.info('[vh] grouped %s with %s', borrower, ', '.join(lenders))
        return group

    def reclaim(self, group):
        """
        End a group's burst; copy back once its redirected writes have drained.
        """
        group.state = GroupState.RECLAIMING
        logger.info('[vh] reclaiming group of %s (%s redirected pages)', group.borrower, group.redirected_pages)
        if group.inflight_writes == 0:
            self._copy_back(group)

    def _release(self, group):
        group.state = GroupState.RELEASED
        for lender in group.lenders:
            self.lending.pop(lender, None)
        del self.groups[group.borrower]
        self.released.append(group)
        logger.info('[vh] released group of %s, %s pages copied back', group.borrower, group.copyback_pages)

    # Command handling

    def overhead_ns(self, cmd):
        if cmd.device in self.groups or cmd.device in self.lending:
            return self.host.config.vh_overhead_ns
        return 0

    def route(self, cmd, extra_ns=0):
        """
        Rewrite or split ``cmd``; returns False when it was taken over here.
        """
        if cmd.is_read:
            return self._route_read(cmd, extra_ns)
        if self._copying.intersection(cmd.lpns):
            self._blocked.append((cmd, extra_ns))
            return False
        group = self.groups.get(cmd.device)
        extents = self.extents.get(cmd.device)
        target = cmd.device
        if group is not None and group.state == GroupState.ACTIVE:
            target = group.next_member()
        if target == cmd.device:
            if extents:
                for lpn in cmd.lpns:
                    extents.pop(lpn, None)
            return True
        start = group.staging_next[target]
        if start + cmd.count > self.host.config.vh_staging_pages:
            self.counts['staging_exhausted'] += 1
            if extents:
                for lpn in cmd.lpns:
                    extents.pop(lpn, None)
            return True
        group.staging_next[target] = start + cmd.count
        base = self.staging_base(target) + start
        self._generation += 1
        for index, lpn in enumerate(cmd.lpns):
            extents[lpn] = (target, base + index, self._generation)
        cmd.payload = [cmd.token_for(index) for index in range(cmd.count)]
        cmd.device = target
        cmd.lpn = base
        cmd.redirected = True
        group.redirected_pages += cmd.count
        group.inflight_writes += 1
        self.counts['redirected_writes'] += 1
        return True

    def _route_read(self, cmd, extra_ns):
        extents = self.extents.get(cmd.device)
        if not extents or not any(lpn in extents for lpn in cmd.lpns):
            return True
        runs = []
        for index, lpn in enumerate(cmd.lpns):
            where = extents.get(lpn)
            device, page = (cmd.device, lpn) if where is None else where[:2]
            last = runs[-1] if runs else None
            if last is not None and last[0] == device and last[1] + last[2] == page:
                last[2] += 1
            else:
                runs.append([device, page, 1, index])
        self.counts['split_reads'] += 1
        cmd.data = [0] * cmd.count
        pending = {'left': len(runs), 'parent': cmd}
        for device, page, count, offset in runs:
            child = self.host.new_command(Opcode.READ, device, page, count, internal=True)
            child.on_complete = lambda done, offset=offset: self._piece_done(pending, done, offset)
            self.host.submit(child)
        return False

    def _piece_done(self, pending, child, offset):
        parent = pending['parent']
        parent.data[offset:offset + child.count] = child.data
        if child.status == CommandStatus.ERROR:
            parent.status = CommandStatus.ERROR
        pending['left'] -= 1
        if pending['left'] == 0:
            if parent.status == CommandStatus.PENDING:
                parent.status = CommandStatus.SUCCESS
            self.host.finish(parent)

    def on_complete(self, cmd):
        """
        Completion hook; never suppresses delivery.
        """
        if cmd.redirected and not cmd.is_read and cmd.origin in self.groups:
            group = self.groups[cmd.origin]
            group.inflight_writes -= 1
            if group.state == GroupState.RECLAIMING and group.inflight_writes == 0:
                self._copy_back(group)
        return False

    # Copyback

    def _copy_back(self, group):
        if self.ideal:
            self._release(group)
            return
        extents = self.extents[group.borrower]
        runs = deque()
        for lpn in sorted(extents):
            lender, page, _ = extents[lpn]
            last = runs[-1] if runs else None
            if (last is not None and last[1] == lender and last[0] + last[3] == lpn
                    and last[2] + last[3] == page and last[3] < COPYBACK_RUN):
                last[3] += 1
            else:
                runs.append([lpn, lender, page, 1])
        self._copy_queue[group.borrower] = {'runs': runs, 'inflight': 0}
        self._pump(group)

    def _pump(self, group):
        state = self._copy_queue[group.borrower]
        runs = state['runs']
        while runs and state['inflight'] < COPYBACK_INFLIGHT:
            lpn, lender, page, count = runs.popleft()
            extents = self.extents[group.borrower]
            if self.host.devices[lender].failed:
                continue
            expected = {}
            for index in range(count):
                where = extents.get(lpn + index)
                if where is not None and where[:2] == (lender, page + index):
                    expected[lpn + index] = where[2]
            if not expected:
                continue
            self._copying.update(expected)
            state['inflight'] += 1
            read = self.host.new_command(Opcode.READ, lender, page, count, internal=True)
            read.on_complete = lambda done, lpn=lpn, expected=expected: self._copy_read(group, lpn, expected, done)
            self.host.submit(read)
        if not runs and state['inflight'] == 0:
            del self._copy_queue[group.borrower]
            self._release(group)

    def _copy_read(self, group, lpn, expected, read):
        write = self.host.new_command(
            Opcode.WRITE, group.borrower, lpn, read.count, internal=True, payload=list(read.data),
        )
        write.on_complete = lambda done: self._copy_written(group, expected, done)
        self.host.submit(write)

    def _copy_written(self, group, expected, write):
        extents = self.extents[group.borrower]
        for lpn, generation in expected.items():
            where = extents.get(lpn)
            if where is not None and where[2] == generation:
                del extents[lpn]
        group.copyback_pages += write.count
        self.counts['copyback_pages'] += write.count
        self._copying.difference_update(expected)
        self._copy_queue[group.borrower]['inflight'] -= 1
        self._unblock()
        self._pump(group)

    def _unblock(self):
        for _ in range(len(self._blocked)):
            cmd, extra_ns = self._blocked.popleft()
            if self.route(cmd, extra_ns):
                self.host.dispatch(cmd, extra_ns)

    def snapshot(self):
        groups = list(self.groups.values()) + self.released
        return {
            'counts': dict(sorted(self.counts.items())),
            'groups': [
                {
                    'borrower': group.borrower,
                    'lenders': list(group.lenders),
                    'state': group.state,
                    'redirected_pages': group.redirected_pages,
                    'copyback_bytes': group.copyback_bytes,
                }
                for group in groups
            ],
            'extents': {borrower: len(extents) for borrower, extents in sorted(self.extents.items())},
        }


class OpenChannelHost:
    """
    Open-channel baseline: every SSD's firmware runs on the shared host cores,
    which pull commands from the SSDs' queues in turn.
    """

    def __init__(self, host):
        self.host = host
        self._order = deque()
        host.cores.set_fetch(self.fetch)

    def add(self, device):
        self._order.append(device.id)

    def fetch(self):
        for _ in range(len(self._order)):
            device_id = self._order[0]
            self._order.rotate(-1)
            if device_id in self.host.failed_devices:
                continue
            cmd = self.host.fetch_for(device_id)
            if cmd is not None:
                device = self.host.devices[device_id]
                return device.admission_job(cmd, device)
        return None
