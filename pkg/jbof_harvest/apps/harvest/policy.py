"""
Trigger policies of the harvesting daemon.

Everything here is a pure function of sampled state, so the agent, the host
driver and the tests all evaluate the same decisions.
"""
from fractions import Fraction

import attr

from .constants import (
    BASIS_POINTS,
    MAX_BORROW_SEGMENTS,
    MISS_RATIO_THRESHOLD,
    MRC_SLOPE_CUTOFF,
    MRC_WARM_SAMPLES,
    PROCESSOR_WATERMARK,
    Action,
)


@attr.s(frozen=True)
class DramDecision:
    action = attr.ib(type=str)
    segments = attr.ib(type=int, default=0)


NO_DRAM_ACTION = DramDecision(Action.NONE)


def decide_processor_action(sample, watermark=PROCESSOR_WATERMARK):
    """
    Lend cores when they are underused, borrow when only the cores are busy.

    A processor at or above the watermark with busy flash gains nothing from
    extra cores, so the SSD does nothing.
    """
    if sample.processor < watermark:
        return Action.LEND
    if sample.flash < watermark:
        return Action.BORROW
    return Action.NONE


def _basis_points(value):
    return max(1, int(value))


def compute_redirect_ratio(u_borrow, u_lend, w_borrow_sq, sum_w_borrow, w_shadow_sq, sum_w_lend):
    """
    Commands the borrower keeps per command it redirects, and the resulting
    redirect probability.

    Utilizations are in basis points; a zero utilization counts as one.
    Returns ``(ratio, probability)`` with ``ratio`` an exact ``Fraction``.
    """
    for name, weight in (('w_borrow_sq', w_borrow_sq), ('sum_w_borrow', sum_w_borrow),
                         ('w_shadow_sq', w_shadow_sq), ('sum_w_lend', sum_w_lend)):
        if weight <= 0:
            raise ValueError(f'{name} must be positive, got {weight}')
    ratio = (
        Fraction(_basis_points(u_lend), _basis_points(u_borrow))
        * Fraction(sum_w_lend, w_shadow_sq)
        * Fraction(w_borrow_sq, sum_w_borrow)
    )
    return ratio, float(1 / (1 + ratio))


def redirect_probability(descriptor, borrower_weight, sum_borrower_weights, shadow_weight, sum_lender_weights):
    """
    Redirect probability from a claimed processor descriptor's utilizations.
    """
    return compute_redirect_ratio(
        round(descriptor.borrower_utilization * BASIS_POINTS),
        round(descriptor.lender_utilization * BASIS_POINTS),
        borrower_weight, sum_borrower_weights, shadow_weight, sum_lender_weights,
    )


def split_redirect(ratios):
    """
    Per-lender redirect probabilities for a borrower bound to several lenders.

    Lender ``i`` gets ``(1/r_i) / (1 + sum_j 1/r_j)``; one lender reduces to
    ``1 / (1 + r)``.
    """
    inverses = [1 / Fraction(ratio) for ratio in ratios]
    total = 1 + sum(inverses)
    return [float(inverse / total) for inverse in inverses]


def smooth(previous, current, factor):
    """
    Exponential smoothing of a probability across refreshes.
    """
    if previous is None:
        return current
    return factor * previous + (1 - factor) * current


def knee(mrc, limit, epsilon=MRC_SLOPE_CUTOFF):
    """
    Smallest size (at least one segment) past which every further segment lowers
    the miss ratio by less than ``epsilon``.
    """
    size = max(1, limit)
    while size > 1 and mrc.miss_ratio(size - 1) - mrc.miss_ratio(size) < epsilon:
        size -= 1
    return size


def decide_dram_action(mrc, current_segments, total_segments, threshold=MISS_RATIO_THRESHOLD,
                       epsilon=MRC_SLOPE_CUTOFF, borrow_cap=MAX_BORROW_SEGMENTS,
                       warm_samples=MRC_WARM_SAMPLES, horizon=None):
    """
    Lend the segments the miss ratio curve says are no help, or borrow enough to
    bring the miss ratio under ``threshold``.

    ``current_segments`` is the mapping cache size in use now (local plus
    borrowed); ``total_segments`` is the device's own DRAM, which bounds the
    curve search unless ``horizon`` (in segments) is given. Borrowing stops at
    ``borrow_cap`` more segments even if the threshold is not reached.
    """
    if mrc is None or mrc.samples < warm_samples:
        return NO_DRAM_ACTION
    limit = horizon or max(total_segments, current_segments) + MAX_BORROW_SEGMENTS
    needed = knee(mrc, limit, epsilon)
    if needed < current_segments:
        return DramDecision(Action.LEND, current_segments - needed)
    if mrc.miss_ratio(current_segments) <= threshold:
        return NO_DRAM_ACTION
    target = current_segments
    while target < current_segments + borrow_cap and mrc.miss_ratio(target) > threshold:
        target += 1
    if target == current_segments:
        return NO_DRAM_ACTION
    return DramDecision(Action.BORROW, target - current_segments)
