"""
Data types of the discrete-event kernel.
"""
import attr

PENDING = 'pending'
DISPATCHED = 'dispatched'
CANCELLED = 'cancelled'


@attr.s(slots=True)
class SimEvent:
    """
    A timestamped event in the global queue.

    Events dispatch in nondecreasing ``fire_time``; equal times dispatch in
    ``sequence`` order, which is the order they were scheduled in.
    """
    fire_time = attr.ib(type=int)
    sequence = attr.ib(type=int)
    target = attr.ib(type=str)
    kind = attr.ib(type=str)
    args = attr.ib(type=tuple, default=())
    state = attr.ib(type=str, default=PENDING)


@attr.s(slots=True, frozen=True)
class EventHandle:
    """
    Returned by ``schedule``; allows cancelling the event before it fires.
    """
    event = attr.ib()
    engine = attr.ib(repr=False, eq=False)

    @property
    def fire_time(self):
        return self.event.fire_time

    @property
    def active(self):
        return self.event.state == PENDING

    def cancel(self):
        """
        Cancel the event. Cancelling an event that already fired or was already
        cancelled is a no-op; returns whether this call cancelled it.
        """
        return self.engine.cancel(self)


@attr.s(frozen=True)
class DispatchStats:
    """
    Counters returned by ``run_until``.
    """
    dispatched = attr.ib(type=int)
    cancelled = attr.ib(type=int)
    pending = attr.ib(type=int)
    scheduled = attr.ib(type=int)
    now = attr.ib(type=int)

    def as_dict(self):
        return attr.asdict(self)
