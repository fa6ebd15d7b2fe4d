"""
Trace records and synthetic workload profiles.
"""
import math

import attr

from jbof_harvest.apps.core.constants import GB, KB

from .constants import DEFAULT_ZIPF_THETA, MIN_REQUEST_SIZE, AccessPattern, TraceOp


def _non_negative(instance, attribute, value):
    if value < 0:
        raise ValueError(f'{attribute.name} must not be negative, got {value}')


def _positive(instance, attribute, value):
    if value <= 0:
        raise ValueError(f'{attribute.name} must be positive, got {value}')


def _ratio(instance, attribute, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f'{attribute.name} must lie in [0, 1], got {value}')


def _request_size(instance, attribute, value):
    if value * KB < MIN_REQUEST_SIZE:
        raise ValueError(f'{attribute.name} must be at least {MIN_REQUEST_SIZE // KB} KB, got {value}')


@attr.s(frozen=True, slots=True)
class TraceRecord:
    """
    One block I/O request of a trace: ``size`` bytes at byte ``offset`` of
    ``device``, issued ``timestamp_us`` microseconds into the run.
    """
    timestamp_us = attr.ib(type=float, converter=float, validator=_non_negative)
    device = attr.ib(type=str)
    op = attr.ib(type=str, validator=attr.validators.in_(TraceOp.ALL))
    offset = attr.ib(type=int, validator=_non_negative)
    size = attr.ib(type=int, validator=_positive)

    @property
    def is_read(self):
        return self.op == TraceOp.READ

    @property
    def timestamp_ns(self):
        # Rounded up so replay never issues ahead of the trace; the inner round
        # absorbs float noise below a picosecond.
        return math.ceil(round(self.timestamp_us * 1000, 3))


@attr.s(frozen=True)
class SyntheticProfile:
    """
    Workload statistics a request stream is drawn from.

    Sizes are means in KB. ``iops`` is the arrival rate used when the profile is
    rendered as an open-loop trace; closed-loop drivers ignore it.
    """
    name = attr.ib(type=str)
    read_ratio = attr.ib(type=float, validator=_ratio)
    mean_read_kb = attr.ib(type=float, validator=_request_size)
    mean_write_kb = attr.ib(type=float, validator=_request_size)
    footprint = attr.ib(type=int, default=16 * GB, validator=_positive)
    pattern = attr.ib(type=str, default=AccessPattern.ZIPF, validator=attr.validators.in_(AccessPattern.ALL))
    theta = attr.ib(type=float, default=DEFAULT_ZIPF_THETA, validator=_positive)
    iops = attr.ib(type=float, default=20_000.0, validator=_positive)

    def evolve(self, **changes):
        return attr.evolve(self, **changes)
