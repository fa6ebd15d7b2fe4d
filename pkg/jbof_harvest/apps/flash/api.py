"""
The flash backbone of one SSD: channels, dies, planes, blocks and pages with
ONFi-style timing and contention.

Each die and channel is a ``Calendar``. A read holds its die from the start of
the cell phase until its page has crossed the channel; a program moves the page
over the channel first and then holds the die for the cell phase; an erase only
holds the die. Operations on one die are served in submission order.
"""
import logging
from collections import Counter

from jbof_harvest.apps.engine.stations import Calendar

from .constants import DEFAULT_DIE_HISTORY_NS, FlashOpKind
from .data import FlashGeometry, FlashTiming
from .exceptions import FlashAddressError, ProgramError, UtilizationWindowError

logger = logging.getLogger(__name__)


class _DieGroup:
    """
    The latest operation on a die, kept so a same-kind, same-page operation on
    another plane can share its cell time.
    """
    __slots__ = ('kind', 'page', 'block', 'planes', 'cell_start', 'cell_end')

    def __init__(self, kind, page, block, plane, cell_start, cell_end):
        self.kind = kind
        self.page = page
        self.block = block
        self.planes = {plane}
        self.cell_start = cell_start
        self.cell_end = cell_end


class FlashBackbone:
    """
    Timing and state of one SSD's flash array.
    """

    def __init__(self, engine, geometry=None, timing=None, die_history_ns=DEFAULT_DIE_HISTORY_NS, name='flash'):
        self.engine = engine
        self.geometry = geometry or FlashGeometry()
        self.timing = timing or FlashTiming()
        self.name = name
        self.dies = [Calendar(history_ns=die_history_ns) for _ in range(self.geometry.dies)]
        self.channels = [Calendar() for _ in range(self.geometry.channels)]
        self.op_counts = Counter()
        self.cell_ns = Counter()
        self.transfer_bytes = 0
        self._groups = [None] * self.geometry.dies
        self._programmed = {}

    @staticmethod
    def page_type(page):
        """LSB, CSB and MSB pages cycle within a block."""
        return page % 3

    def validate(self, address):
        geometry = self.geometry
        if not (
            0 <= address.channel < geometry.channels
            and 0 <= address.die < geometry.dies_per_channel
            and 0 <= address.plane < geometry.planes_per_die
            and 0 <= address.block < geometry.blocks_per_plane
            and 0 <= address.page < geometry.pages_per_block
        ):
            raise FlashAddressError(f'{self.name}: address {address} outside {geometry}')

    def mark_programmed(self, block_key, pages):
        """
        Record that the first ``pages`` pages of a block hold data (prefilled state).
        """
        self._programmed[block_key] = pages

    def programmed_pages(self, block_key):
        return self._programmed.get(block_key, 0)

    def submit(self, op, earliest=None):
        """
        Reserve the die and channel for ``op`` and return its completion time (ns).
        ``earliest`` delays the start for operations that reach the data-end later.
        """
        self.validate(op.address)
        now = self.engine.now
        earliest = now if earliest is None else max(now, int(earliest))
        address = op.address
        die_index = self.geometry.die_index(address.channel, address.die)
        die = self.dies[die_index]
        channel = self.channels[address.channel]
        transfer = self.geometry.transfer_ns
        op.issue_time = now
        op.page_type = self.page_type(address.page)
        cell = self.timing.cell_time(op.kind, op.page_type)

        if op.kind == FlashOpKind.PROGRAM:
            self._check_program(address)
            ready = max(earliest, die.free_at)
            tx_start = channel.reserve(now, ready, transfer)
            done = tx_start + transfer + cell
            die.append(now, tx_start, done - tx_start)
            op.start_time = tx_start
            op.service_ns = transfer + cell
            self._groups[die_index] = None
            self.transfer_bytes += self.geometry.page_size
        else:
            group = self._groups[die_index]
            if self._can_join(group, op, earliest):
                op.joined = True
                cell_end = group.cell_end
                group.planes.add(address.plane)
                op.start_time = group.cell_start
            else:
                cell_start = max(earliest, die.free_at)
                cell_end = cell_start + cell
                op.start_time = cell_start
                group = _DieGroup(op.kind, address.page, address.block, address.plane, cell_start, cell_end)
                self._groups[die_index] = group
            if op.kind == FlashOpKind.READ:
                tx_start = channel.reserve(now, cell_end, transfer)
                done = tx_start + transfer
                op.service_ns = cell + transfer
                self.transfer_bytes += self.geometry.page_size
            else:
                done = cell_end
                op.service_ns = cell
                self._programmed.pop(address.block_key, None)
            if op.joined:
                die.extend_last(done)
            else:
                die.append(now, op.start_time, done - op.start_time)

        op.complete_time = done
        self.op_counts[op.kind] += 1
        if not op.joined:
            self.cell_ns[op.kind] += cell
        return done

    def _can_join(self, group, op, earliest):
        """
        Simplified multi-plane rule: same kind, same page offset, a plane not yet
        in the group, and the shared cell phase has not started.
        """
        return (
            group is not None
            and group.kind == op.kind
            and group.page == op.address.page
            and op.address.plane not in group.planes
            and earliest <= group.cell_start
        )

    def _check_program(self, address):
        written = self._programmed.get(address.block_key, 0)
        if address.page < written:
            raise ProgramError(f'{self.name}: page {address} programmed without an erase')
        self._programmed[address.block_key] = address.page + 1

    def utilization_window(self, start, end):
        """
        Mean die-busy fraction over [start, end).
        """
        if end <= start:
            raise UtilizationWindowError(f'empty window [{start}, {end})')
        if end > self.engine.now:
            raise UtilizationWindowError(f'window end {end} is after now={self.engine.now}')
        busy = sum(die.busy_between(start, end) for die in self.dies)
        return busy / (len(self.dies) * (end - start))

    def counters(self):
        return {
            'ops': dict(self.op_counts),
            'cell_ns': dict(self.cell_ns),
            'die_busy_ns': sum(die.busy_ns for die in self.dies),
            'channel_busy_ns': sum(channel.busy_ns for channel in self.channels),
            'transfer_bytes': self.transfer_bytes,
        }
