"""
Tests for the mapping-region reader-writer locks.
"""
import pytest

from jbof_harvest.apps.core.exceptions import InvariantViolation
from jbof_harvest.apps.engine.api import SimulationEngine

from ..constants import LockMode
from ..exceptions import LockError
from ..locks import LockTable


class Requester:
    """
    Stand-in device actor that records the grants delivered to it.
    """

    def __init__(self, engine, name):
        self.engine = engine
        self.name = name
        self.granted = []
        engine.register(name, self)

    def on_lock_grant(self, callback, args):
        callback(*args)

    def note(self, label):
        self.granted.append((self.engine.now, label))


class TestLockTable:
    """
    Tests for ``LockTable``.
    """

    @pytest.fixture
    def engine(self):
        return SimulationEngine(seed=0)

    @pytest.fixture
    def table(self, engine):
        return LockTable(engine, round_trip_ns=400, keep_log=True)

    def test_local_free_lock_is_granted_synchronously(self, engine, table):
        Requester(engine, 'ssd0')
        assert table.acquire('c1', 'ssd0', 'ssd0', 5, LockMode.WRITE, None)
        assert table.holds('c1', 'ssd0', 5)
        assert table.release('c1', 'ssd0', 5) == 0

    def test_uncontended_remote_acquire_takes_a_round_trip(self, engine, table):
        lender = Requester(engine, 'ssd1')
        Requester(engine, 'ssd0')
        assert not table.acquire('c1', 'ssd1', 'ssd0', 5, LockMode.READ, lender.note, 'c1')
        engine.run_until(10_000)
        assert lender.granted == [(400, 'c1')]
        assert table.release('c1', 'ssd0', 5) == 400

    def test_reader_behind_waiting_writer_waits(self, engine, table):
        owner = Requester(engine, 'ssd0')
        assert table.acquire('r1', 'ssd0', 'ssd0', 1, LockMode.READ, owner.note, 'r1')
        assert not table.acquire('w1', 'ssd0', 'ssd0', 1, LockMode.WRITE, owner.note, 'w1')
        assert not table.acquire('r2', 'ssd0', 'ssd0', 1, LockMode.READ, owner.note, 'r2')
        engine.run_until(100)
        assert owner.granted == []
        table.release('r1', 'ssd0', 1)
        engine.run_until(200)
        assert [label for _, label in owner.granted] == ['w1']
        table.release('w1', 'ssd0', 1)
        engine.run_until(300)
        assert [label for _, label in owner.granted] == ['w1', 'r2']
        table.check_exclusion()

    def test_readers_share(self, engine, table):
        Requester(engine, 'ssd0')
        assert table.acquire('r1', 'ssd0', 'ssd0', 1, LockMode.READ, None)
        assert table.acquire('r2', 'ssd0', 'ssd0', 1, LockMode.READ, None)
        assert table.lock('ssd0', 1).mode == LockMode.READ

    def test_consecutive_waiting_readers_are_granted_together(self, engine, table):
        owner = Requester(engine, 'ssd0')
        table.acquire('w1', 'ssd0', 'ssd0', 1, LockMode.WRITE, None)
        table.acquire('r1', 'ssd0', 'ssd0', 1, LockMode.READ, owner.note, 'r1')
        table.acquire('r2', 'ssd0', 'ssd0', 1, LockMode.READ, owner.note, 'r2')
        table.release('w1', 'ssd0', 1)
        engine.run_until(10)
        assert [label for _, label in owner.granted] == ['r1', 'r2']

    def test_double_unlock_rejected(self, engine, table):
        Requester(engine, 'ssd0')
        table.acquire('c1', 'ssd0', 'ssd0', 5, LockMode.READ, None)
        table.release('c1', 'ssd0', 5)
        with pytest.raises(LockError):
            table.release('c1', 'ssd0', 5)

    def test_release_all_frees_failed_device(self, engine, table):
        owner = Requester(engine, 'ssd0')
        Requester(engine, 'ssd1')
        table.acquire('remote', 'ssd1', 'ssd0', 2, LockMode.WRITE, lambda: None)
        table.acquire('local', 'ssd0', 'ssd0', 2, LockMode.WRITE, owner.note, 'local')
        table.release_all('ssd1')
        engine.run_until(1_000)
        assert owner.granted == [(0, 'local')]

    def test_exclusion_check_flags_overlap(self, engine, table):
        table.log.extend([
            (0, 'grant', 'ssd0', 1, 'a', LockMode.READ),
            (1, 'grant', 'ssd0', 1, 'b', LockMode.WRITE),
        ])
        with pytest.raises(InvariantViolation):
            table.check_exclusion()

    def test_writer_intervals_never_overlap(self, engine, table):
        owner = Requester(engine, 'ssd0')
        remote = Requester(engine, 'ssd1')
        granted = []

        def hold(holder, who):
            granted.append(holder)
            engine.schedule(1_000, who.name, 'lock_grant', table.release, (holder, 'ssd0', 9))

        for i in range(6):
            who = owner if i % 2 else remote
            mode = LockMode.WRITE if i % 3 == 0 else LockMode.READ
            holder = f'h{i}'
            if table.acquire(holder, who.name, 'ssd0', 9, mode, hold, holder, who):
                hold(holder, who)
        engine.run_until(10 ** 6)
        assert sorted(granted) == [f'h{i}' for i in range(6)]
        table.check_exclusion()
