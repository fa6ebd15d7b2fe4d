"""
Tests for the discrete-event kernel.
"""
import io

import ddt
import numpy as np
import pytest
from django.test import SimpleTestCase

from jbof_harvest.apps.core.exceptions import InvariantViolation

from ..api import RngStreams, SimulationEngine
from ..exceptions import SchedulingError


class Recorder:
    """
    Actor that remembers what it was asked to do and when.
    """

    def __init__(self, engine):
        self.engine = engine
        self.seen = []
        self.failed = False

    def on_tick(self, label):
        self.seen.append((self.engine.now, label))


class Chatter:
    """
    Actor that keeps scheduling itself with random delays drawn from a substream.
    """

    def __init__(self, engine, name):
        self.engine = engine
        self.name = name

    def on_talk(self, hops):
        if hops:
            delay = int(self.engine.rng.stream('chatter').integers(0, 1000))
            self.engine.schedule(delay, self.name, 'talk', hops - 1)


@ddt.ddt
class SimulationEngineTests(SimpleTestCase):
    """
    Tests for ``SimulationEngine``.
    """

    def setUp(self):
        super().setUp()
        self.engine = SimulationEngine(seed=7)
        self.recorder = Recorder(self.engine)
        self.engine.register('host', self.recorder)

    def test_zero_delay_fires_before_later_events(self):
        self.engine.schedule(5, 'host', 'tick', 'later')
        self.engine.schedule(0, 'host', 'tick', 'now')
        self.engine.run_until(100)
        assert self.recorder.seen == [(0, 'now'), (5, 'later')]

    def test_equal_times_dispatch_in_schedule_order(self):
        self.engine.schedule(100, 'host', 'tick', 'A')
        self.engine.schedule(100, 'host', 'tick', 'B')
        self.engine.run_until(1000)
        assert [label for _, label in self.recorder.seen] == ['A', 'B']

    def test_fire_time_is_now_plus_delay(self):
        self.engine.schedule(5_000, 'host', 'tick', 'first')
        self.engine.run_until(5_000)
        handle = self.engine.schedule(30_000, 'host', 'tick', 'flash-done')
        assert handle.fire_time == 35_000
        self.engine.run_until(10 ** 6)
        assert self.recorder.seen[-1] == (35_000, 'flash-done')

    @ddt.data(-1, -30_000)
    def test_negative_delay_rejected(self, delay):
        with pytest.raises(SchedulingError):
            self.engine.schedule(delay, 'host', 'tick', 'x')

    def test_unknown_actor_rejected(self):
        with pytest.raises(SchedulingError):
            self.engine.schedule(1, 'ssd99', 'tick', 'x')

    def test_empty_queue_advances_clock_to_end(self):
        stats = self.engine.run_until(10 ** 9)
        assert stats.now == 10 ** 9
        assert stats.dispatched == 0

    def test_single_event_clock_ends_at_cap(self):
        self.engine.schedule(10, 'host', 'tick', 'x')
        stats = self.engine.run_until(10 ** 6)
        assert stats.dispatched == 1
        assert self.engine.now == 10 ** 6

    def test_event_count_cap_stops_at_last_dispatch(self):
        for delay in (10, 20, 30):
            self.engine.schedule(delay, 'host', 'tick', delay)
        stats = self.engine.run_until(10 ** 6, max_events=2)
        assert stats.dispatched == 2
        assert stats.now == 20
        assert stats.pending == 1

    def test_cancellation_keeps_accounting(self):
        keep = self.engine.schedule(10, 'host', 'tick', 'keep')
        drop = self.engine.schedule(20, 'host', 'tick', 'drop')
        assert drop.cancel()
        assert not drop.cancel()
        self.engine.schedule(30, 'host', 'tick', 'pending')
        self.engine.run_until(15)
        self.engine.check_conservation()
        stats = self.engine.stats()
        assert stats.dispatched + stats.cancelled + stats.pending == stats.scheduled
        assert not keep.active
        assert [label for _, label in self.recorder.seen] == ['keep']

    def test_conservation_detects_corruption(self):
        self.engine.schedule(10, 'host', 'tick', 'x')
        self.engine.dispatched += 1
        with pytest.raises(InvariantViolation):
            self.engine.check_conservation()

    def test_failed_actor_events_are_consumed(self):
        self.recorder.failed = True
        self.engine.schedule(1, 'host', 'tick', 'lost')
        stats = self.engine.run_until(10)
        assert stats.dispatched == 1
        assert self.engine.ignored == 1
        assert not self.recorder.seen

    def test_identical_seed_gives_identical_dispatch_log(self):
        logs = []
        for _ in range(2):
            engine = SimulationEngine(seed=42)
            for i in range(3):
                engine.register(f'ssd{i}', Chatter(engine, f'ssd{i}'))
                engine.schedule(0, f'ssd{i}', 'talk', 200)
            stream = io.StringIO()
            engine.trace_to(stream)
            engine.run_until(10 ** 9)
            logs.append(stream.getvalue())
        assert logs[0] == logs[1]
        assert len(logs[0].splitlines()) == 603


class RngStreamsTests(SimpleTestCase):
    """
    Tests for ``RngStreams``.
    """

    def test_same_seed_same_stream(self):
        assert RngStreams(3).draw('redirect') == RngStreams(3).draw('redirect')
        a = RngStreams(11).stream('workload').random(100)
        b = RngStreams(11).stream('workload').random(100)
        assert np.array_equal(a, b)

    def test_named_streams_are_uncorrelated(self):
        rng = RngStreams(5)
        redirect = rng.stream('redirect').random(100_000)
        workload = rng.stream('workload').random(100_000)
        assert abs(np.corrcoef(redirect, workload)[0, 1]) < 0.05
        assert not np.array_equal(redirect[:10], workload[:10])

    def test_draws_are_uniform(self):
        draws = RngStreams(1).stream('workload').random(1_000_000)
        assert 0.499 <= draws.mean() <= 0.501
        assert draws.min() >= 0.0
        assert draws.max() < 1.0
