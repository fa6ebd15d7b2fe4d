"""
Tests for weighted round-robin arbitration.
"""
from django.test import SimpleTestCase

from ..data import QueuePair
from ..queues import WrrArbiter


def pair(sqid, weight, commands=()):
    qp = QueuePair(sqid=sqid, cqid=sqid, owner='ssd0', depth=64, weight=weight)
    qp.sq.extend(commands)
    return qp


def drain(arbiter):
    order = []
    while True:
        found = arbiter.next()
        if found is None:
            return order
        order.append(found[1])


class WrrArbiterTests(SimpleTestCase):
    """
    Tests for ``WrrArbiter``.
    """

    def test_each_queue_is_served_its_weight(self):
        arbiter = WrrArbiter([pair(1, 2, 'aaaa'), pair(2, 1, 'bbbb')])
        assert ''.join(drain(arbiter)) == 'aabaabbb'

    def test_empty_queues_are_skipped(self):
        arbiter = WrrArbiter([pair(1, 4), pair(2, 1, 'bb'), pair(3, 1)])
        assert drain(arbiter) == ['b', 'b']

    def test_nothing_to_fetch(self):
        assert WrrArbiter([pair(1, 1), pair(2, 3)]).next() is None

    def test_fetches_are_counted_per_queue(self):
        first, second = pair(1, 1, 'xyz'), pair(2, 1, 'uv')
        arbiter = WrrArbiter([first, second])
        assert arbiter.backlog() == 5
        assert drain(arbiter) == ['x', 'u', 'y', 'v', 'z']
        assert (first.fetched, second.fetched) == (3, 2)
        assert arbiter.backlog() == 0

    def test_late_arrivals_join_the_rotation(self):
        first, second = pair(1, 1, 'a'), pair(2, 1)
        arbiter = WrrArbiter([first, second])
        assert arbiter.next() == (first, 'a')
        second.sq.append('b')
        first.sq.append('c')
        assert drain(arbiter) == ['b', 'c']
