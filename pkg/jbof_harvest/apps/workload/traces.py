"""
Block I/O traces: the on-disk format and synthetic generation.

A trace file is comma-separated text with the header
``timestamp_us,device_id,op,offset,size``; ``op`` is ``R`` or ``W`` and
offsets and sizes are in bytes.
"""
import csv
import heapq
import logging
from itertools import count as counter

import attr
import numpy as np

from jbof_harvest.apps.core.constants import LPN_SIZE

from .constants import SIZE_QUANTUM, TRACE_HEADER, ZIPF_RANKS, AccessPattern, TraceOp
from .data import TraceRecord
from .exceptions import TraceFormatError

logger = logging.getLogger(__name__)


@attr.s(slots=True)
class TraceLog:
    """
    The records of a loaded trace in replay order, plus what loading fixed up.
    """
    records = attr.ib(factory=list)
    skipped = attr.ib(type=int, default=0)
    reordered = attr.ib(type=int, default=0)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def devices(self):
        return sorted({record.device for record in self.records})


def load_trace(path, columns=None):
    """
    Read a trace file.

    ``columns`` maps record fields (``timestamp_us``, ``device_id``, ``op``,
    ``offset``, ``size``) to the header names used by the file, for traces
    exported with other column names.

    Malformed lines are skipped with a warning. Records of each device are
    stable-sorted by timestamp, and devices are merged into one stream ordered
    by time.

    Raises:
        TraceFormatError: the header lacks a required column.
    """
    columns = {**{field: field for field in TRACE_HEADER}, **dict(columns or {})}
    log = TraceLog()
    per_device = {}
    with open(path, newline='', encoding='utf-8') as stream:
        reader = csv.reader(stream)
        header = None
        for row in reader:
            line = reader.line_num
            if not row or not any(cell.strip() for cell in row):
                continue
            if header is None:
                header = _read_header(row, columns, line)
                continue
            try:
                record = _parse_row(row, header)
            except (ValueError, TypeError, IndexError) as exc:
                log.skipped += 1
                logger.warning('[trace] %s:%s skipped: %s', path, line, exc)
                continue
            per_device.setdefault(record.device, []).append(record)

    arrival = counter()
    streams = []
    for device, records in per_device.items():
        ordered = sorted(records, key=lambda record: record.timestamp_us)
        if ordered != records:
            moved = sum(1 for before, after in zip(records, ordered) if before is not after)
            log.reordered += moved
            logger.warning('[trace] %s: %s records of %s out of timestamp order, sorted', path, moved, device)
        rank = next(arrival)
        streams.append([(record.timestamp_us, rank, index, record) for index, record in enumerate(ordered)])
    log.records = [entry[-1] for entry in heapq.merge(*streams)]
    logger.info('[trace] loaded %s records from %s (%s skipped)', len(log.records), path, log.skipped)
    return log


def _read_header(row, columns, line):
    names = [cell.strip() for cell in row]
    positions = {}
    for field in TRACE_HEADER:
        name = columns[field]
        if name not in names:
            raise TraceFormatError(f'header has no {name!r} column (found {",".join(names)})', line)
        positions[field] = names.index(name)
    return positions


def _parse_row(row, header):
    values = {field: row[index].strip() for field, index in header.items()}
    op = values['op'].upper()
    if op not in TraceOp.ALL:
        raise ValueError(f'unknown op {values["op"]!r}')
    return TraceRecord(
        timestamp_us=float(values['timestamp_us']),
        device=values['device_id'],
        op=op,
        offset=int(values['offset']),
        size=int(values['size']),
    )


def write_trace(path, records):
    """
    Write records in the trace file format; ``load_trace`` reads them back.
    """
    written = 0
    with open(path, 'w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(TRACE_HEADER)
        for record in records:
            writer.writerow((repr(record.timestamp_us), record.device, record.op, record.offset, record.size))
            written += 1
    return written


class RequestSampler:
    """
    Draws (op, offset, size) requests from a ``SyntheticProfile``.

    Sizes follow an exponential law quantized to whole 4 KB pages: the page
    count is geometric with the profile mean, at least one page. Offsets are
    page aligned and lie within the footprint, capped at ``capacity`` bytes.
    """

    def __init__(self, profile, rng, capacity=None):
        self.profile = profile
        self.rng = rng
        footprint = profile.footprint if capacity is None else min(profile.footprint, capacity)
        self.pages = max(1, footprint // LPN_SIZE)
        self._cursor = 0
        self._read_p = self._geometric_p(profile.mean_read_kb)
        self._write_p = self._geometric_p(profile.mean_write_kb)
        self._zipf = None
        if profile.pattern == AccessPattern.ZIPF:
            self._zipf = self._zipf_layout(profile.theta)

    @staticmethod
    def _geometric_p(mean_kb):
        return min(1.0, SIZE_QUANTUM / (mean_kb * 1024))

    def _zipf_layout(self, theta):
        ranks = min(ZIPF_RANKS, self.pages)
        weights = 1.0 / np.power(np.arange(1, ranks + 1, dtype=float), theta)
        cdf = np.cumsum(weights)
        cdf /= cdf[-1]
        # Hot ranks are scattered over the footprint rather than packed at its start.
        placement = self.rng.permutation(ranks)
        return cdf, placement, self.pages // ranks

    def __iter__(self):
        return self

    def __next__(self):
        return self.next_request()

    def next_request(self):
        is_read = self.rng.random() < self.profile.read_ratio
        p = self._read_p if is_read else self._write_p
        pages = min(int(self.rng.geometric(p)), self.pages)
        page = self._page(pages)
        op = TraceOp.READ if is_read else TraceOp.WRITE
        return op, page * LPN_SIZE, pages * LPN_SIZE

    def _page(self, pages):
        limit = self.pages - pages + 1
        pattern = self.profile.pattern
        if pattern == AccessPattern.SEQUENTIAL:
            if self._cursor >= limit:
                self._cursor = 0
            page = self._cursor
            self._cursor += pages
            return page
        if pattern == AccessPattern.UNIFORM:
            return int(self.rng.integers(0, limit))
        cdf, placement, span = self._zipf
        rank = min(int(np.searchsorted(cdf, self.rng.random(), side='right')), len(cdf) - 1)
        page = int(placement[rank]) * span + int(self.rng.integers(0, span))
        return min(page, limit - 1)


def generate(profile, duration_us=None, seed=0, device='ssd0', count=None, capacity=None):
    """
    Render a profile as an open-loop trace.

    Arrivals are Poisson at ``profile.iops``; generation stops at ``duration_us``
    or after ``count`` records, whichever comes first. The same seed always
    yields the same stream.
    """
    if duration_us is None and count is None:
        raise ValueError('generate needs a duration or a record count')
    return _records(profile, duration_us, seed, device, count, capacity)


def _records(profile, duration_us, seed, device, count, capacity):
    sequence = np.random.SeedSequence(int(seed))
    arrivals, requests = (np.random.Generator(np.random.PCG64(child)) for child in sequence.spawn(2))
    sampler = RequestSampler(profile, requests, capacity=capacity)
    gap_us = 1e6 / profile.iops
    now = 0.0
    produced = 0
    while count is None or produced < count:
        now += float(arrivals.exponential(gap_us))
        timestamp = round(now, 3)
        if duration_us is not None and timestamp >= duration_us:
            return
        op, offset, size = sampler.next_request()
        yield TraceRecord(timestamp_us=timestamp, device=device, op=op, offset=offset, size=size)
        produced += 1
