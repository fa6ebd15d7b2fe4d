"""
Online miss ratio curves for the mapping cache.

``ShardsMrc`` samples mapping regions spatially (a region is tracked when its
stable hash modulo P falls under T, so the rate is T/P), measures LRU reuse
distances over the sampled references and rescales them by 1/rate.
"""
from collections import Counter

import numpy as np

from jbof_harvest.apps.core.utils import stable_hash

from .constants import MRC_WARM_SAMPLES

SAMPLING_MODULUS = 1 << 24


class _Fenwick:
    """
    Prefix sums over reference positions; grows by doubling.
    """

    def __init__(self, size=1024):
        self.tree = [0] * (size + 1)

    def _grow(self, index):
        size = len(self.tree) - 1
        while index >= size:
            size *= 2
        values = [self.prefix(i) - self.prefix(i - 1) for i in range(len(self.tree) - 1)]
        self.tree = [0] * (size + 1)
        for position, value in enumerate(values):
            if value:
                self.add(position, value)

    def add(self, index, delta):
        if index >= len(self.tree) - 1:
            self._grow(index)
        i = index + 1
        while i < len(self.tree):
            self.tree[i] += delta
            i += i & -i

    def prefix(self, index):
        """Sum of positions ``0..index`` inclusive."""
        total = 0
        i = min(index + 1, len(self.tree) - 1)
        while i > 0:
            total += self.tree[i]
            i -= i & -i
        return total


class ShardsMrc:
    """
    Sampled LRU miss ratio curve over mapping regions.

    ``miss_ratio(c)`` takes a cache size in units of ``unit`` regions (one DRAM
    segment by default of the caller) and is a nonincreasing step function with
    ``miss_ratio(0) == 1``.
    """

    def __init__(self, rate=1.0, unit=1, salt='shards', warm_samples=MRC_WARM_SAMPLES):
        if not 0.0 < rate <= 1.0:
            raise ValueError(f'sampling rate must be in (0, 1], got {rate}')
        self.rate = rate
        self.unit = unit
        self.salt = salt
        self.warm_samples = warm_samples
        self.threshold = int(round(rate * SAMPLING_MODULUS))
        self.references = 0
        self.samples = 0
        self.cold = 0
        self._positions = {}
        self._tree = _Fenwick()
        # Reuse distance -> number of sampled references at that distance.
        self._distances = Counter()
        self._curve = None

    @property
    def warm(self):
        return self.samples >= self.warm_samples

    def sampled(self, key):
        if self.threshold >= SAMPLING_MODULUS:
            return True
        return stable_hash(self.salt, key) % SAMPLING_MODULUS < self.threshold

    def access(self, key):
        self.references += 1
        if not self.sampled(key):
            return
        position = self.samples
        self.samples += 1
        previous = self._positions.get(key)
        if previous is None:
            self.cold += 1
        else:
            # Distinct sampled keys touched since the previous reference.
            distinct = self._tree.prefix(position - 1) - self._tree.prefix(previous)
            self._distances[distinct / self.rate] += 1
            self._tree.add(previous, -1)
        self._tree.add(position, 1)
        self._positions[key] = position
        self._curve = None

    def _histogram(self):
        """
        Distinct distances in ascending order and the references at or below each.
        """
        if self._curve is None:
            distances = np.fromiter(self._distances, dtype=float, count=len(self._distances))
            counts = np.fromiter(self._distances.values(), dtype=np.int64, count=len(self._distances))
            order = np.argsort(distances)
            self._curve = distances[order], np.cumsum(counts[order])
        return self._curve

    def miss_ratio(self, size):
        """
        Miss ratio of an LRU cache holding ``size * unit`` regions.
        """
        if self.samples == 0 or size <= 0:
            return 1.0
        capacity = size * self.unit
        # A reference hits when fewer than ``capacity`` distinct keys came between.
        distances, cumulative = self._histogram()
        below = int(np.searchsorted(distances, capacity, side='left'))
        hits = int(cumulative[below - 1]) if below else 0
        return 1.0 - hits / self.samples

    def curve(self, sizes):
        return [self.miss_ratio(size) for size in sizes]

    def as_dict(self, sizes):
        return {
            'rate': self.rate,
            'references': self.references,
            'samples': self.samples,
            'curve': {str(size): round(self.miss_ratio(size), 6) for size in sizes},
        }


def exact_mrc(trace, sizes, unit=1):
    """
    Exact LRU miss ratios: every reference sampled, so each reuse distance is exact.
    """
    mrc = ShardsMrc(rate=1.0, unit=unit)
    for key in trace:
        mrc.access(key)
    return mrc.curve(sizes)
