"""
NVMe weighted round-robin arbitration.
"""


class WrrArbiter:
    """
    Deterministic weighted round robin over the submission queues of one SSD.

    The current queue is served until it has used ``weight`` credits or runs
    empty; then the next queue in order gets its full weight. An empty queue is
    skipped, so the arbiter never idles while any queue holds a command.
    """

    def __init__(self, queues=()):
        self.queues = []
        self._index = 0
        self._credit = 0
        for qp in queues:
            self.add(qp)

    def add(self, qp):
        self.queues.append(qp)
        if len(self.queues) == 1:
            self._credit = qp.weight

    def backlog(self):
        return sum(len(qp.sq) for qp in self.queues)

    def next(self):
        """
        Return (queue pair, command) for the next command to fetch, or None.
        """
        for _ in range(len(self.queues) + 1):
            qp = self.queues[self._index]
            if qp.sq and self._credit > 0:
                self._credit -= 1
                cmd = qp.sq.popleft()
                qp.fetched += 1
                if self._credit == 0:
                    self._advance()
                return qp, cmd
            self._advance()
        return None

    def _advance(self):
        self._index = (self._index + 1) % len(self.queues)
        self._credit = self.queues[self._index].weight
