"""
Reader-writer locks over mapping-table regions shared through the fabric.

A lock lives with the region's owner. Requests are granted in FIFO order:
readers share the lock, a writer holds it alone, and a reader that arrives
behind a waiting writer waits too. A grant to a remote requester reaches it
one fabric round trip later.
"""
import logging
from collections import deque

from jbof_harvest.apps.core.exceptions import InvariantViolation

from .constants import LockMode
from .exceptions import LockError

logger = logging.getLogger(__name__)


class RwLock:
    """
    State of one reader-writer lock.
    """

    def __init__(self, owner, key):
        self.owner = owner
        self.key = key
        self.mode = None
        # holder -> requesting device
        self.holders = {}
        self.waiters = deque()

    def __repr__(self):
        return f'<RwLock {self.owner}:{self.key} mode={self.mode} holders={len(self.holders)}>'

    def admits(self, mode):
        if self.waiters:
            return False
        if mode == LockMode.READ:
            return self.mode in (None, LockMode.READ)
        return self.mode is None


class LockTable:
    """
    All mapping-region locks in the system, created on first use.

    Args:
        engine: the simulation engine; remote grants are delivered as
            ``lock_grant`` events to the requesting device's actor.
        round_trip_ns: cost of one remote acquire or release.
        keep_log (bool): record every grant and release for exclusion checks.
    """

    def __init__(self, engine, round_trip_ns, keep_log=False):
        self.engine = engine
        self.round_trip_ns = round_trip_ns
        self.keep_log = keep_log
        self.log = []
        self.acquired = 0
        self.contended = 0
        self._locks = {}

    def lock(self, owner, key):
        lock = self._locks.get((owner, key))
        if lock is None:
            lock = self._locks[(owner, key)] = RwLock(owner, key)
        return lock

    def holds(self, holder, owner, key):
        lock = self._locks.get((owner, key))
        return lock is not None and holder in lock.holders

    def acquire(self, holder, requester, owner, key, mode, callback, *args):
        """
        Request ``mode`` access to the region ``key`` of ``owner``.

        Returns True when the lock was granted synchronously, which happens only
        for a local requester on a lock that admits it; ``callback`` is then not
        called. Otherwise ``callback(*args)`` runs on the requester once the grant
        reaches it.
        """
        if mode not in LockMode.ALL:
            raise ValueError(f'unknown lock mode {mode}')
        lock = self.lock(owner, key)
        self.acquired += 1
        if lock.admits(mode):
            self._grant(lock, holder, requester, mode)
            if requester == owner:
                return True
            self.engine.schedule(self.round_trip_ns, requester, 'lock_grant', callback, args)
            return False
        self.contended += 1
        lock.waiters.append((holder, requester, mode, callback, args))
        return False

    def release(self, holder, owner, key):
        """
        Release ``holder``'s grant and hand the lock to the next waiters.
        Returns the release cost in nanoseconds seen by the holder.
        """
        lock = self._locks.get((owner, key))
        if lock is None or holder not in lock.holders:
            raise LockError(f'{holder} released {owner}:{key} without holding it')
        requester = lock.holders.pop(holder)
        self._record('release', lock, holder, lock.mode)
        if not lock.holders:
            lock.mode = None
            self._wake(lock)
        return 0 if requester == owner else self.round_trip_ns

    def release_all(self, requester):
        """
        Drop every grant and pending request of a failed device.
        """
        for lock in list(self._locks.values()):
            lock.waiters = deque(waiter for waiter in lock.waiters if waiter[1] != requester)
            for holder, holding_device in list(lock.holders.items()):
                if holding_device == requester:
                    self.release(holder, lock.owner, lock.key)
            if not lock.holders:
                self._wake(lock)

    def _wake(self, lock):
        while lock.waiters:
            holder, requester, mode, callback, args = lock.waiters[0]
            if mode == LockMode.WRITE and lock.holders:
                break
            if mode == LockMode.READ and lock.mode == LockMode.WRITE:
                break
            lock.waiters.popleft()
            self._grant(lock, holder, requester, mode)
            delay = 0 if requester == lock.owner else self.round_trip_ns
            self.engine.schedule(delay, requester, 'lock_grant', callback, args)
            if mode == LockMode.WRITE:
                break

    def _grant(self, lock, holder, requester, mode):
        if lock.mode == LockMode.WRITE or (mode == LockMode.WRITE and lock.holders):
            raise InvariantViolation(f'{lock!r} granted {mode} to {holder} while held')
        lock.mode = mode
        lock.holders[holder] = requester
        self._record('grant', lock, holder, mode)

    def _record(self, action, lock, holder, mode):
        if self.keep_log:
            self.log.append((self.engine.now, action, lock.owner, lock.key, holder, mode))

    def check_exclusion(self):
        """
        Replay the grant log and make sure no writer ever overlapped another holder.
        """
        held = {}
        for _, action, owner, key, holder, mode in self.log:
            current = held.setdefault((owner, key), {})
            if action == 'grant':
                if current and (mode == LockMode.WRITE or LockMode.WRITE in current.values()):
                    raise InvariantViolation(f'overlapping grants on {owner}:{key}')
                current[holder] = mode
            else:
                current.pop(holder, None)
