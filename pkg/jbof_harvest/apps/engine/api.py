"""
The discrete-event kernel: simulated clock, event queue and seeded randomness.
"""
import heapq
import logging

import numpy as np

from jbof_harvest.apps.core.exceptions import InvariantViolation
from jbof_harvest.apps.core.utils import stable_hash

from .data import CANCELLED, DISPATCHED, PENDING, DispatchStats, EventHandle, SimEvent
from .exceptions import SchedulingError

logger = logging.getLogger(__name__)


class RngStreams:
    """
    Named, independent random substreams derived from one seed.

    Each stream is seeded from ``SeedSequence(seed, spawn_key=(hash(name),))`` so
    adding a new decision site never perturbs the draws of existing ones.
    """

    def __init__(self, seed):
        self.seed = int(seed)
        self._streams = {}

    def stream(self, name):
        """
        Return the ``numpy.random.Generator`` for the named substream.
        """
        generator = self._streams.get(name)
        if generator is None:
            sequence = np.random.SeedSequence(self.seed, spawn_key=(stable_hash(name),))
            generator = np.random.Generator(np.random.PCG64(sequence))
            self._streams[name] = generator
        return generator

    def draw(self, name):
        """
        Uniform value in [0, 1) from the named substream.
        """
        return float(self.stream(name).random())


class SimulationEngine:
    """
    Single-threaded discrete-event engine.

    Actors register under a string id; an event of kind ``k`` addressed to an actor
    is dispatched to its ``on_k(*args)`` method. Actors exposing a truthy ``failed``
    attribute have their events consumed without effect.
    """

    def __init__(self, seed=0):
        self.now = 0
        self.rng = RngStreams(seed)
        self.scheduled = 0
        self.dispatched = 0
        self.cancelled = 0
        self.ignored = 0
        self._queue = []
        self._sequence = 0
        self._actors = {}
        self._trace = None

    def register(self, actor_id, actor):
        if actor_id in self._actors:
            raise SchedulingError(f'actor {actor_id} is already registered')
        self._actors[actor_id] = actor

    def actor(self, actor_id):
        return self._actors[actor_id]

    def trace_to(self, stream):
        """
        Write one ``time target kind`` line per dispatched event to ``stream``.
        """
        self._trace = stream

    @property
    def pending(self):
        return self.scheduled - self.dispatched - self.cancelled

    def schedule(self, delay, target, kind, *args):
        """
        Enqueue an event ``delay`` nanoseconds from now.
        """
        if delay < 0:
            raise SchedulingError(f'negative delay {delay} for {target}.{kind}')
        return self.schedule_at(self.now + int(delay), target, kind, *args)

    def schedule_at(self, fire_time, target, kind, *args):
        fire_time = int(fire_time)
        if fire_time < self.now:
            raise SchedulingError(f'event {target}.{kind} at {fire_time} is before now={self.now}')
        if target not in self._actors:
            raise SchedulingError(f'unknown actor {target}')
        event = SimEvent(fire_time, self._sequence, target, kind, args)
        self._sequence += 1
        self.scheduled += 1
        heapq.heappush(self._queue, (fire_time, event.sequence, event))
        return EventHandle(event, self)

    def cancel(self, handle):
        event = handle.event
        if event.state != PENDING:
            return False
        event.state = CANCELLED
        self.cancelled += 1
        return True

    def run_until(self, end=None, max_events=None):
        """
        Dispatch every event with ``fire_time <= end`` (or until ``max_events``
        dispatches). When the queue drains before ``end`` the clock is advanced to
        ``end``.
        """
        budget = max_events
        capped = False
        while self._queue:
            fire_time, _, event = self._queue[0]
            if end is not None and fire_time > end:
                break
            if event.state == CANCELLED:
                heapq.heappop(self._queue)
                continue
            if budget is not None and budget <= 0:
                capped = True
                break
            heapq.heappop(self._queue)
            self.now = fire_time
            self._dispatch(event)
            if budget is not None:
                budget -= 1
        if end is not None and not capped:
            self.now = max(self.now, int(end))
        return self.stats()

    def stats(self):
        return DispatchStats(
            dispatched=self.dispatched,
            cancelled=self.cancelled,
            pending=self.pending,
            scheduled=self.scheduled,
            now=self.now,
        )

    def check_conservation(self):
        """
        dispatched + cancelled + pending == scheduled, and pending matches the queue.
        """
        live = sum(1 for _, _, event in self._queue if event.state == PENDING)
        if live != self.pending:
            raise InvariantViolation(
                f'event accounting broken: scheduled={self.scheduled} dispatched={self.dispatched} '
                f'cancelled={self.cancelled} live={live}'
            )

    def _dispatch(self, event):
        event.state = DISPATCHED
        self.dispatched += 1
        if self._trace is not None:
            self._trace.write(f'{event.fire_time} {event.target} {event.kind}\n')
        actor = self._actors[event.target]
        if getattr(actor, 'failed', False):
            self.ignored += 1
            return
        getattr(actor, 'on_' + event.kind)(*event.args)
