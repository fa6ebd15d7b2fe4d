"""
Tests for the harvesting trigger policies.
"""
import random
from fractions import Fraction

import ddt
import pytest
from django.test import SimpleTestCase

from jbof_harvest.apps.ssd.data import UtilizationSample

from ..constants import Action
from ..mrc import ShardsMrc
from ..policy import (
    DramDecision,
    compute_redirect_ratio,
    decide_dram_action,
    decide_processor_action,
    knee,
    split_redirect,
)


def sample(processor, flash):
    return UtilizationSample(start=0, end=10, processor=processor, flash=flash, miss_ratio=0.0)


def cyclic_mrc(keys, passes):
    mrc = ShardsMrc(rate=1.0, unit=1)
    for _ in range(passes):
        for key in range(keys):
            mrc.access(key)
    return mrc


@ddt.ddt
class ProcessorActionTests(SimpleTestCase):
    """
    Tests for ``decide_processor_action``.
    """

    @ddt.data(
        (0.80, 0.80, Action.NONE),
        (0.50, 0.95, Action.LEND),
        (0.95, 0.42, Action.BORROW),
        (0.74, 0.10, Action.LEND),
        (0.75, 0.75, Action.NONE),
    )
    @ddt.unpack
    def test_decisions(self, processor, flash, expected):
        assert decide_processor_action(sample(processor, flash)) == expected

    def test_watermark_is_configurable(self):
        assert decide_processor_action(sample(0.6, 0.1), watermark=0.5) == Action.BORROW


@ddt.ddt
class RedirectRatioTests(SimpleTestCase):
    """
    Tests for ``compute_redirect_ratio`` and the multi-lender split.
    """

    def test_ratio_three_redirects_a_quarter(self):
        ratio, probability = compute_redirect_ratio(2500, 7500, 1, 1, 1, 1)
        assert ratio == 3
        assert probability == pytest.approx(0.25)

    def test_symmetric_inputs(self):
        ratio, probability = compute_redirect_ratio(5000, 5000, 1, 1, 1, 1)
        assert ratio == 1
        assert probability == pytest.approx(0.5)

    def test_weighted_example(self):
        ratio, probability = compute_redirect_ratio(
            u_borrow=6000, u_lend=2000, w_borrow_sq=2, sum_w_borrow=4, w_shadow_sq=1, sum_w_lend=4,
        )
        assert ratio == Fraction(2, 3)
        assert probability == pytest.approx(0.6)

    def test_idle_borrower_counts_as_one_basis_point(self):
        ratio, _ = compute_redirect_ratio(0, 5000, 1, 1, 1, 1)
        assert ratio == 5000

    def test_weights_must_be_positive(self):
        with pytest.raises(ValueError):
            compute_redirect_ratio(5000, 5000, 0, 1, 1, 1)

    @ddt.data(
        ('u_lend', +1), ('sum_w_lend', +1), ('w_borrow_sq', +1),
        ('u_borrow', -1), ('w_shadow_sq', -1), ('sum_w_borrow', -1),
    )
    @ddt.unpack
    def test_probability_is_monotone_in_each_argument(self, name, ratio_direction):
        rng = random.Random(name)
        for _ in range(200):
            args = {
                'u_borrow': rng.randint(1, 10_000), 'u_lend': rng.randint(1, 10_000),
                'w_borrow_sq': rng.randint(1, 8), 'sum_w_borrow': rng.randint(8, 16),
                'w_shadow_sq': rng.randint(1, 8), 'sum_w_lend': rng.randint(8, 16),
            }
            _, before = compute_redirect_ratio(**args)
            args[name] += rng.randint(1, 100)
            _, after = compute_redirect_ratio(**args)
            if ratio_direction > 0:
                assert after < before
            else:
                assert after > before

    def test_single_lender_split_matches_formula(self):
        assert split_redirect([3]) == [pytest.approx(0.25)]

    def test_split_over_lenders(self):
        first, second = split_redirect([1, 2])
        # 1 / (1 + 1 + 1/2) and (1/2) / (1 + 1 + 1/2)
        assert first == pytest.approx(0.4)
        assert second == pytest.approx(0.2)


class DramActionTests(SimpleTestCase):
    """
    Tests for ``decide_dram_action`` over measured miss ratio curves.
    """

    def test_flat_curve_lends_nearly_everything(self):
        rng = random.Random(7)
        mrc = ShardsMrc(rate=1.0, unit=1)
        for _ in range(20_000):
            mrc.access(rng.randrange(1_000_000))
        decision = decide_dram_action(mrc, current_segments=64, total_segments=64)
        assert decision.action == Action.LEND
        assert decision.segments == 63

    def test_working_set_just_above_cache_borrows_the_difference(self):
        mrc = cyclic_mrc(keys=10, passes=100)
        assert mrc.miss_ratio(10) == pytest.approx(0.01)
        decision = decide_dram_action(mrc, current_segments=8, total_segments=8)
        assert decision.action == Action.BORROW
        assert decision.segments == 2

    def test_cache_already_under_threshold_does_nothing(self):
        mrc = cyclic_mrc(keys=10, passes=100)
        assert decide_dram_action(mrc, current_segments=10, total_segments=10).action == Action.NONE

    def test_cold_curve_does_nothing(self):
        mrc = cyclic_mrc(keys=10, passes=2)
        assert decide_dram_action(mrc, current_segments=1, total_segments=8).action == Action.NONE

    def test_borrowing_is_capped(self):
        mrc = cyclic_mrc(keys=20, passes=100)
        decision = decide_dram_action(mrc, current_segments=8, total_segments=8, borrow_cap=10)
        assert decision == DramDecision(Action.BORROW, 10)

    def test_knee_of_cyclic_curve_is_the_working_set(self):
        assert knee(cyclic_mrc(keys=10, passes=100), limit=40) == 10
