"""
Service resources driven by the engine.

* ``Calendar``: first-fit reservation of one resource (flash die, channel, link).
* ``ServiceStation``: a pool of identical servers (firmware or host cores) with a
  continuation queue and an optional pull source.
* ``FifoLine``: a single-server bounded FIFO with fixed service time whose
  schedule is computed at admission (data-end agent queues).
"""
import logging
from bisect import bisect_left, bisect_right
from collections import defaultdict, deque

import attr

from jbof_harvest.apps.core.constants import PS_PER_NS
from jbof_harvest.apps.core.utils import ceil_div, cycles_to_ps

logger = logging.getLogger(__name__)


class Calendar:
    """
    Non-overlapping busy intervals of a single resource, in nanoseconds.

    ``reserve`` places an interval in the first gap at or after ``earliest`` that
    is long enough. Intervals ending more than ``history_ns`` before ``now`` are
    forgotten; keep a history when window utilization must be measured.
    """

    def __init__(self, history_ns=0):
        self.history_ns = history_ns
        self.busy_ns = 0
        self._starts = []
        self._ends = []

    def __len__(self):
        return len(self._starts)

    @property
    def free_at(self):
        return self._ends[-1] if self._ends else 0

    def reserve(self, now, earliest, duration):
        self._prune(now - self.history_ns)
        start = max(now, earliest)
        i = bisect_right(self._ends, start)
        while i < len(self._starts) and self._starts[i] < start + duration:
            start = max(start, self._ends[i])
            i += 1
        self._starts.insert(i, start)
        self._ends.insert(i, start + duration)
        self.busy_ns += duration
        return start

    def append(self, now, earliest, duration):
        """
        Reserve after every existing interval (strict FIFO order).
        """
        self._prune(now - self.history_ns)
        start = max(now, earliest, self.free_at)
        self._starts.append(start)
        self._ends.append(start + duration)
        self.busy_ns += duration
        return start

    def extend_last(self, new_end):
        """
        Stretch the latest interval to ``new_end`` (used when a joined operation
        keeps the resource busy longer).
        """
        if self._ends and new_end > self._ends[-1]:
            self.busy_ns += new_end - self._ends[-1]
            self._ends[-1] = new_end

    def busy_between(self, start, end):
        """
        Busy nanoseconds overlapping [start, end).
        """
        total = 0
        i = bisect_right(self._ends, start)
        while i < len(self._starts) and self._starts[i] < end:
            total += min(end, self._ends[i]) - max(start, self._starts[i])
            i += 1
        return total

    def _prune(self, before):
        if before <= 0 or not self._ends or self._ends[0] > before:
            return
        k = bisect_left(self._ends, before)
        del self._starts[:k]
        del self._ends[:k]


@attr.s(slots=True)
class Job:
    """
    A unit of work for a ``ServiceStation``; ``callback(*args)`` runs when it ends.
    """
    service_ps = attr.ib(type=int)
    callback = attr.ib()
    args = attr.ib(type=tuple, default=())
    tag = attr.ib(default=None)
    enqueued_ps = attr.ib(type=int, default=0)


class ServiceStation:
    """
    A pool of identical servers accounted in picoseconds.

    Free servers take work from the continuation queue first, then pull new work
    from ``fetch`` (e.g. the NVMe arbiter), and only then run guest continuations
    (work done on behalf of another device), so in-flight commands make progress
    before new ones are admitted and a lender keeps serving its own queues.
    """

    def __init__(self, engine, actor_id, servers, frequency_hz, owner=None):
        self.engine = engine
        self.actor_id = actor_id
        self.servers = servers
        self.frequency_hz = frequency_hz
        self.owner = owner
        self.busy_ps = 0
        self.busy_by_tag = defaultdict(int)
        self.completed = 0
        self._free_at_ps = [0] * servers
        self._idle = list(range(servers - 1, -1, -1))
        self._continuations = deque()
        self._guests = deque()
        self._fetch = None
        engine.register(actor_id, self)

    @property
    def failed(self):
        return bool(self.owner is not None and getattr(self.owner, 'failed', False))

    @property
    def idle_servers(self):
        return len(self._idle)

    @property
    def queued(self):
        return len(self._continuations) + len(self._guests)

    def set_fetch(self, fetch):
        """
        ``fetch()`` returns the next ``Job`` to admit, or None.
        """
        self._fetch = fetch

    def cycles_ps(self, cycles):
        return cycles_to_ps(cycles, self.frequency_hz)

    def submit(self, cycles, callback, *args, tag=None, guest=False):
        self.submit_ps(self.cycles_ps(cycles), callback, *args, tag=tag, guest=guest)

    def submit_ps(self, service_ps, callback, *args, tag=None, guest=False):
        queue = self._guests if guest else self._continuations
        queue.append(Job(service_ps, callback, args, tag, self.engine.now * PS_PER_NS))
        self.kick()

    def kick(self):
        """
        Start work on every idle server that can find some.
        """
        while self._idle and not self.failed:
            if self._continuations:
                job = self._continuations.popleft()
            else:
                job = self._fetch() if self._fetch is not None else None
                if job is not None:
                    job.enqueued_ps = self.engine.now * PS_PER_NS
                elif self._guests:
                    job = self._guests.popleft()
                else:
                    return
            self._start(self._idle.pop(), job)

    def _start(self, server, job):
        start_ps = max(self._free_at_ps[server], job.enqueued_ps)
        end_ps = start_ps + job.service_ps
        self._free_at_ps[server] = end_ps
        self.busy_ps += job.service_ps
        if job.tag is not None:
            self.busy_by_tag[job.tag] += job.service_ps
        self.engine.schedule_at(ceil_div(end_ps, PS_PER_NS), self.actor_id, 'job_done', server, job)

    def on_job_done(self, server, job):
        self._idle.append(server)
        self.completed += 1
        job.callback(*job.args)
        self.kick()


class FifoLine:
    """
    Single-server FIFO with a fixed service time (picoseconds) and bounded depth.

    ``admit(arrival_ps)`` returns the picosecond at which the item leaves the line.
    An arrival that finds ``depth`` items waiting or in service is held back until
    the oldest of them leaves.
    """

    def __init__(self, service_ps, depth):
        self.service_ps = service_ps
        self.depth = depth
        self.admitted = 0
        self.busy_ps = 0
        self.held_back = 0
        self._free_ps = 0
        self._ends = deque()

    def occupancy(self, at_ps):
        return sum(1 for end in self._ends if end > at_ps)

    def admit(self, arrival_ps):
        while self._ends and self._ends[0] <= arrival_ps:
            self._ends.popleft()
        if len(self._ends) >= self.depth:
            self.held_back += 1
            arrival_ps = self._ends[-self.depth]
            while self._ends and self._ends[0] <= arrival_ps:
                self._ends.popleft()
        start = max(arrival_ps, self._free_ps)
        end = start + self.service_ps
        self._free_ps = end
        self._ends.append(end)
        self.admitted += 1
        self.busy_ps += self.service_ps
        return end
