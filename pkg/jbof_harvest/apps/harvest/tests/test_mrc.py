"""
Tests for the sampled miss ratio curve.
"""
import numpy as np
import pytest

from ..mrc import ShardsMrc, exact_mrc


def lru_stack_miss_ratios(trace, sizes):
    stack, distances = [], []
    for key in trace:
        if key in stack:
            distances.append(len(stack) - 1 - stack.index(key))
            stack.remove(key)
        stack.append(key)
    return [
        1.0 - sum(1 for distance in distances if distance < size) / len(trace) if size > 0 else 1.0
        for size in sizes
    ]


def zipf_trace(length, keys, exponent, seed):
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, keys + 1) ** exponent
    return rng.choice(keys, size=length, p=weights / weights.sum()).tolist()


class TestShardsMrc:
    """
    Tests for ``ShardsMrc``.
    """

    def test_empty_curve_misses_everything(self):
        mrc = ShardsMrc()
        assert mrc.miss_ratio(0) == 1.0
        assert mrc.miss_ratio(10) == 1.0

    def test_cache_of_size_zero_always_misses(self):
        mrc = ShardsMrc()
        for key in [1, 1, 1]:
            mrc.access(key)
        assert mrc.miss_ratio(0) == 1.0
        assert mrc.miss_ratio(1) == pytest.approx(1 / 3)

    def test_unit_scales_cache_size(self):
        mrc = ShardsMrc(unit=4)
        for _ in range(10):
            for key in range(8):
                mrc.access(key)
        assert mrc.miss_ratio(1) == 1.0
        assert mrc.miss_ratio(2) == pytest.approx(8 / 80)

    @pytest.mark.parametrize('seed', range(5))
    def test_full_rate_matches_exact_stack_distances(self, seed):
        trace = zipf_trace(1_500, 400, 0.8, seed)
        sizes = list(range(0, 420, 7))
        mrc = ShardsMrc(rate=1.0)
        for key in trace:
            mrc.access(key)
        assert mrc.curve(sizes) == pytest.approx(lru_stack_miss_ratios(trace, sizes), abs=1e-12)

    def test_repeated_reuse_keeps_one_bucket_per_distance(self):
        mrc = ShardsMrc(rate=1.0)
        for _ in range(1_000):
            for key in range(16):
                mrc.access(key)
        assert mrc._distances == {15.0: 15_984}
        assert mrc.miss_ratio(16) == pytest.approx(16 / 16_000)

    def test_curve_is_nonincreasing(self):
        mrc = ShardsMrc(rate=0.1)
        for key in zipf_trace(20_000, 5_000, 0.9, 3):
            mrc.access(key)
        curve = mrc.curve(range(0, 6_000, 50))
        assert all(a >= b for a, b in zip(curve, curve[1:]))
        assert curve[0] == 1.0

    def test_rate_must_be_in_unit_interval(self):
        with pytest.raises(ValueError):
            ShardsMrc(rate=0.0)

    @pytest.mark.slow
    def test_one_percent_sampling_tracks_exact_curve(self):
        trace = zipf_trace(1_000_000, 100_000, 0.9, 11)
        sampled = ShardsMrc(rate=0.01)
        exact = ShardsMrc(rate=1.0)
        for key in trace:
            sampled.access(key)
            exact.access(key)
        sizes = list(range(0, 100_001, 1_000))
        error = np.abs(np.array(sampled.curve(sizes)) - np.array(exact.curve(sizes)))
        assert error.mean() <= 0.05


class TestExactMrc:
    """
    Tests for ``exact_mrc``.
    """

    def test_cyclic_trace_thrashes_until_the_loop_fits(self):
        keys, loops = 5_000, 20
        trace = list(range(keys)) * loops
        ratios = exact_mrc(trace, [0, keys - 1, keys, 2 * keys])
        assert ratios == [1.0, 1.0, pytest.approx(1 / loops), pytest.approx(1 / loops)]

    def test_unit_counts_keys_per_size_step(self):
        trace = list(range(8)) * 10
        assert exact_mrc(trace, [1, 2], unit=4) == [1.0, pytest.approx(8 / 80)]

    @pytest.mark.parametrize('seed', range(3))
    def test_matches_lru_stack_simulation(self, seed):
        trace = zipf_trace(2_000, 300, 0.8, seed)
        sizes = list(range(0, 320, 10))
        assert exact_mrc(trace, sizes) == pytest.approx(lru_stack_miss_ratios(trace, sizes), abs=1e-12)

    def test_empty_trace_misses_everything(self):
        assert exact_mrc([], [0, 4]) == [1.0, 1.0]
