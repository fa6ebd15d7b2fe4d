"""
Commands, queue pairs and host configuration.
"""
from collections import deque

import attr

from jbof_harvest.apps.core.constants import GB, LPN_SIZE, MB
from jbof_harvest.apps.metrics.data import LatencyBreakdown
from jbof_harvest.apps.ssd.constants import CommandStatus, Opcode

from .constants import COMMAND_CYCLES, GroupState, QueueRole


def _positive(instance, attribute, value):
    if value <= 0:
        raise ValueError(f'{attribute.name} must be positive, got {value}')


@attr.s(slots=True, eq=False)
class NvmeCommand:
    """
    One host I/O command of ``count`` logical pages starting at ``lpn``.

    ``device`` is the SSD holding the data; ``executor`` is the SSD whose cores
    processed it (a lender when the command was redirected). Written pages carry
    the identity ``(token, index)``; a read fills ``data`` with the identities it
    returned, 0 for pages never written.
    """
    cmd_id = attr.ib(type=int)
    opcode = attr.ib(type=str, validator=attr.validators.in_(Opcode.ALL))
    device = attr.ib(type=str)
    lpn = attr.ib(type=int)
    count = attr.ib(type=int, default=1, validator=_positive)
    token = attr.ib(default=None)
    on_complete = attr.ib(default=None, repr=False)
    # Device and first page the workload addressed, before any host rerouting.
    origin = attr.ib(default=None)
    origin_lpn = attr.ib(default=None)
    attempt = attr.ib(type=int, default=0)
    sqid = attr.ib(default=None)
    executor = attr.ib(default=None)
    status = attr.ib(type=str, default=CommandStatus.PENDING)
    submit_time = attr.ib(default=None)
    complete_time = attr.ib(default=None)
    latency = attr.ib(factory=LatencyBreakdown)
    mark = attr.ib(type=int, default=0)
    data = attr.ib(factory=list, repr=False)
    redirected = attr.ib(type=bool, default=False)
    # Host-generated traffic (copyback, split reads), left out of workload metrics.
    internal = attr.ib(type=bool, default=False)
    # Explicit page identities to write instead of (token, index), for copies.
    payload = attr.ib(default=None, repr=False)

    def __attrs_post_init__(self):
        if self.origin is None:
            self.origin = self.device
        if self.origin_lpn is None:
            self.origin_lpn = self.lpn

    @property
    def nbytes(self):
        return self.count * LPN_SIZE

    @property
    def is_read(self):
        return self.opcode == Opcode.READ

    @property
    def lpns(self):
        return range(self.lpn, self.lpn + self.count)

    def token_for(self, index):
        if self.payload is not None:
            return self.payload[index]
        return (self.token, index)

    def charge_until(self, now, **parts):
        """
        Close the current stage at ``now``, charging its time to ``parts``.
        """
        self.latency.charge(now - self.mark, **parts)
        self.mark = now

    def retry(self):
        """
        A fresh attempt of this command, for resubmission after a failure.
        """
        return NvmeCommand(
            cmd_id=self.cmd_id,
            opcode=self.opcode,
            device=self.device,
            lpn=self.lpn,
            count=self.count,
            token=self.token,
            on_complete=self.on_complete,
            origin=self.origin,
            origin_lpn=self.origin_lpn,
            attempt=self.attempt + 1,
            submit_time=self.submit_time,
            internal=self.internal,
            payload=self.payload,
        )


@attr.s(slots=True, eq=False)
class QueuePair:
    """
    An NVMe submission/completion queue pair on one SSD.

    A shadow pair is bound to at most one borrower queue at a time; commands in
    it target the borrower's data but are executed by the queue owner.
    """
    sqid = attr.ib(type=int)
    cqid = attr.ib(type=int)
    owner = attr.ib(type=str)
    depth = attr.ib(type=int, validator=_positive)
    weight = attr.ib(type=int, default=1, validator=_positive)
    role = attr.ib(type=str, default=QueueRole.NORMAL)
    # (borrower device, borrower sqid) while bound
    binding = attr.ib(default=None)
    sq = attr.ib(factory=deque, repr=False)
    outstanding = attr.ib(type=int, default=0)
    fetched = attr.ib(type=int, default=0)

    @property
    def is_shadow(self):
        return self.role == QueueRole.SHADOW

    @property
    def full(self):
        return self.outstanding >= self.depth


@attr.s(frozen=True)
class HostConfig:
    """
    The JBOF host (DPU) and its NVMe driver.
    """
    core_count = attr.ib(type=int, default=16, validator=_positive)
    frequency = attr.ib(type=int, default=2_100_000_000, validator=_positive)
    dram_capacity = attr.ib(type=int, default=16 * GB, validator=_positive)
    command_cycles = attr.ib(type=int, default=COMMAND_CYCLES, validator=_positive)
    redirect_ns = attr.ib(type=int, default=20, validator=_positive)
    doorbell_ns = attr.ib(type=int, default=500, validator=_positive)
    interrupt_ns = attr.ib(type=int, default=500, validator=_positive)
    sq_depth = attr.ib(type=int, default=1024, validator=_positive)
    normal_queues = attr.ib(type=int, default=1, validator=_positive)
    normal_weight = attr.ib(type=int, default=1, validator=_positive)
    shadow_queues = attr.ib(type=int, default=4, validator=_positive)
    shadow_weight = attr.ib(type=int, default=1, validator=_positive)
    keepalive_ns = attr.ib(type=int, default=1_000_000, validator=_positive)
    keepalive_misses = attr.ib(type=int, default=3, validator=_positive)
    refresh_ns = attr.ib(type=int, default=10_000_000, validator=_positive)
    # Descriptors older than this many refreshes stop redirection.
    stale_windows = attr.ib(type=int, default=2, validator=_positive)
    redirect_smoothing = attr.ib(type=float, default=0.5)
    # Extra host time per command while a virtual harvesting group is active.
    vh_overhead_ns = attr.ib(type=int, default=500, validator=_positive)
    # Logical pages of each lender set aside for writes redirected by virtual harvesting.
    vh_staging_pages = attr.ib(type=int, default=256 * MB // LPN_SIZE, validator=_positive)

    @property
    def half_command_cycles(self):
        return self.command_cycles // 2


@attr.s(slots=True, eq=False)
class VirtualSsdGroup:
    """
    A busy borrower grouped with idle lenders that absorb its writes.

    ``extents`` maps a borrower page to (lender, lender page, generation) for
    every page whose latest data sits on a lender.
    """
    borrower = attr.ib(type=str)
    lenders = attr.ib(factory=list)
    state = attr.ib(type=str, default=GroupState.ACTIVE)
    extents = attr.ib(factory=dict, repr=False)
    staging_next = attr.ib(factory=dict, repr=False)
    copyback_pages = attr.ib(type=int, default=0)
    redirected_pages = attr.ib(type=int, default=0)
    inflight_writes = attr.ib(type=int, default=0)
    calm_windows = attr.ib(type=int, default=0)
    _cursor = attr.ib(type=int, default=0, repr=False)

    def next_member(self):
        """
        Round robin over the borrower and its lenders, for spreading writes.
        """
        members = [self.borrower] + self.lenders
        member = members[self._cursor % len(members)]
        self._cursor += 1
        return member

    @property
    def copyback_bytes(self):
        return self.copyback_pages * LPN_SIZE
