"""
Harvest sessions and the knobs of the harvesting daemon.
"""
import attr

from .constants import (
    BORROW_CAP,
    DAEMON_CYCLES,
    MAX_BORROW_SEGMENTS,
    MISS_RATIO_THRESHOLD,
    MRC_SLOPE_CUTOFF,
    MRC_WARM_SAMPLES,
    PROCESSOR_WATERMARK,
    REDIRECT_SMOOTHING,
    RELEASE_WATERMARK,
    STALE_WINDOWS,
    ResourceType,
    SessionState,
)


def _fraction(instance, attribute, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f'{attribute.name} must be in [0, 1], got {value}')


def _positive(instance, attribute, value):
    if value <= 0:
        raise ValueError(f'{attribute.name} must be positive, got {value}')


@attr.s(frozen=True)
class HarvestPolicy:
    """
    Which resources are harvested and the thresholds that trigger it.
    """
    processor = attr.ib(type=bool, default=True)
    dram = attr.ib(type=bool, default=True)
    watermark = attr.ib(type=float, default=PROCESSOR_WATERMARK, validator=_fraction)
    release_watermark = attr.ib(type=float, default=RELEASE_WATERMARK)
    miss_threshold = attr.ib(type=float, default=MISS_RATIO_THRESHOLD, validator=_fraction)
    slope_cutoff = attr.ib(type=float, default=MRC_SLOPE_CUTOFF, validator=_fraction)
    warm_samples = attr.ib(type=int, default=MRC_WARM_SAMPLES, validator=_positive)
    shards_rate = attr.ib(type=float, default=0.01, validator=_fraction)
    borrow_cap = attr.ib(type=int, default=BORROW_CAP, validator=_positive)
    max_borrow_segments = attr.ib(type=int, default=MAX_BORROW_SEGMENTS, validator=_positive)
    daemon_cycles = attr.ib(type=int, default=DAEMON_CYCLES, validator=_positive)
    smoothing = attr.ib(type=float, default=REDIRECT_SMOOTHING, validator=_fraction)
    stale_windows = attr.ib(type=int, default=STALE_WINDOWS, validator=_positive)

    @release_watermark.validator
    def _below_watermark(self, attribute, value):
        _fraction(self, attribute, value)
        if value > self.watermark:
            raise ValueError('the release watermark must not exceed the lending watermark')


@attr.s
class HarvestSession:
    """
    One claimed descriptor: a borrower using a lender's cores or DRAM.

    Processor sessions record the bound (borrower SQ, shadow CQ) pair; DRAM
    sessions record the lent region and the borrower's log pages.
    """
    session_id = attr.ib(type=int)
    kind = attr.ib(type=int, validator=attr.validators.in_((ResourceType.PROCESSOR, ResourceType.DRAM)))
    lender = attr.ib(type=str)
    borrower = attr.ib(type=str)
    slot = attr.ib(type=int)
    opened_at = attr.ib(type=int)
    state = attr.ib(type=str, default=SessionState.ACTIVE)
    closed_at = attr.ib(default=None)
    borrower_sqid = attr.ib(default=None)
    shadow_cqid = attr.ib(default=None)
    segments = attr.ib(factory=list)
    log_region = attr.ib(default=None, repr=False)

    @property
    def active(self):
        return self.state == SessionState.ACTIVE

    @property
    def is_processor(self):
        return self.kind == ResourceType.PROCESSOR

    def as_dict(self):
        return {
            'session': self.session_id,
            'kind': dict(ResourceType.CHOICES)[self.kind],
            'lender': self.lender,
            'borrower': self.borrower,
            'state': self.state,
            'opened_ns': self.opened_at,
            'closed_ns': self.closed_at,
            'segments': len(self.segments),
        }


@attr.s
class Offer:
    """
    A descriptor a lender keeps published in its own table.
    """
    kind = attr.ib(type=int)
    slot = attr.ib(type=int)
    shadow_cqid = attr.ib(default=None)
    region = attr.ib(default=None, repr=False)
    regions_lent = attr.ib(type=int, default=0)
    withdrawn = attr.ib(type=bool, default=False)
