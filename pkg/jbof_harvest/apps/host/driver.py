"""
The JBOF host: NVMe queue pairs, submission and completion, shadow queue
redirection and failure handling.

A command is prepared on a host core, routed to a submission queue (the
target's own queue, or a lender's shadow queue when the target is borrowing
processor time), announced with a doorbell and fetched by the executing SSD's
weighted round-robin arbiter. Completions come back on the completion queue of
the pair that carried the command and are finished on a host core.
"""
import logging
from collections import Counter, deque

import attr

from jbof_harvest.apps.core.constants import HOST_ID
from jbof_harvest.apps.core.exceptions import InvariantViolation
from jbof_harvest.apps.core.utils import ps_to_ns_ceil
from jbof_harvest.apps.engine.stations import ServiceStation
from jbof_harvest.apps.harvest.descriptors import IdleResourceDescriptor
from jbof_harvest.apps.harvest.policy import redirect_probability, smooth, split_redirect
from jbof_harvest.apps.ssd.constants import CommandStatus

from .constants import SHADOW_QID_BASE, QueueRole
from .data import HostConfig, NvmeCommand, QueuePair
from .exceptions import QueueBindingError
from .queues import WrrArbiter

logger = logging.getLogger(__name__)


@attr.s(eq=False)
class ShadowBinding:
    """
    A borrower queue bound to a lender's shadow queue pair.
    """
    borrower = attr.ib(type=str)
    lender = attr.ib(type=str)
    shadow = attr.ib(type=QueuePair)
    borrower_qp = attr.ib(type=QueuePair)
    descriptor_address = attr.ib(type=int)
    probability = attr.ib(default=None)
    bound_at = attr.ib(type=int, default=0)


class HostDriver:
    """
    Host side of every SSD in the JBOF.

    ``collector`` receives each delivered workload command; the optional
    ``vh`` manager (virtual harvesting baseline) may rewrite or split commands.
    """

    def __init__(self, engine, fabric=None, config=None, collector=None):
        self.engine = engine
        self.fabric = fabric
        self.config = config or HostConfig()
        self.collector = collector
        self.id = HOST_ID
        self.failed = False
        engine.register(HOST_ID, self)
        self.cores = ServiceStation(engine, 'host.cores', self.config.core_count, self.config.frequency, owner=self)
        self.devices = {}
        self.queues = {}
        self.arbiters = {}
        self.bindings = {}
        self.vh = None
        self.failure_listeners = []
        self.failed_devices = set()
        self.redirect_log = []
        self.counts = Counter()
        self._next_id = 0
        self._outstanding = {}
        self._delivered = set()
        self._queue_of = {}
        self._waiting = {}
        self._misses = Counter()
        self._half_ns = ps_to_ns_ceil(self.cores.cycles_ps(self.config.half_command_cycles))

    def __repr__(self):
        return '<HostDriver>'

    # Setup

    def attach(self, device):
        """
        Create the queue pairs of ``device``: normal pairs from id 1 and the
        reserved shadow pairs from ``SHADOW_QID_BASE``.
        """
        config = self.config
        pairs = [
            QueuePair(sqid=i, cqid=i, owner=device.id, depth=config.sq_depth, weight=config.normal_weight)
            for i in range(1, config.normal_queues + 1)
        ]
        pairs += [
            QueuePair(
                sqid=SHADOW_QID_BASE + i, cqid=SHADOW_QID_BASE + i, owner=device.id, depth=config.sq_depth,
                weight=config.shadow_weight, role=QueueRole.SHADOW,
            )
            for i in range(config.shadow_queues)
        ]
        self.devices[device.id] = device
        self.queues[device.id] = pairs
        self.arbiters[device.id] = WrrArbiter(pairs)
        for qp in pairs:
            self._waiting[qp] = deque()
        device.host = self
        device.peers = self.devices

    def start(self):
        self.engine.schedule(self.config.keepalive_ns, HOST_ID, 'keepalive')
        self.engine.schedule(self.config.refresh_ns, HOST_ID, 'refresh')

    def new_command(self, opcode, device, lpn, count=1, on_complete=None, internal=False, payload=None):
        self._next_id += 1
        return NvmeCommand(
            cmd_id=self._next_id, opcode=opcode, device=device, lpn=lpn, count=count, token=self._next_id,
            on_complete=on_complete, internal=internal, payload=payload,
        )

    def normal_queues(self, device_id):
        return [qp for qp in self.queues[device_id] if not qp.is_shadow]

    def queue(self, device_id, cqid):
        for qp in self.queues.get(device_id, ()):
            if qp.cqid == cqid:
                return qp
        raise QueueBindingError(f'{device_id} has no queue pair with CQID {cqid}')

    # Submission

    def submit(self, cmd):
        """
        Hand a command to the host; it completes through ``cmd.on_complete``.
        """
        now = self.engine.now
        if cmd.submit_time is None:
            cmd.submit_time = now
        cmd.mark = now
        self._outstanding[cmd.cmd_id] = cmd
        self.counts['submitted'] += 1
        self.cores.submit(self.config.half_command_cycles, self._submitted, cmd)

    def _submitted(self, cmd):
        now = self.engine.now
        cmd.charge_until(now, host=self._half_ns)
        if self._outstanding.get(cmd.cmd_id) is not cmd:
            return
        if cmd.device in self.failed_devices:
            self._fail(cmd)
            return
        extra_ns = 0
        if self.vh is not None and not cmd.internal:
            extra_ns = self.vh.overhead_ns(cmd)
            if not self.vh.route(cmd, extra_ns):
                return
        self.dispatch(cmd, extra_ns)

    def dispatch(self, cmd, extra_ns=0):
        """
        Route ``cmd`` and ring the doorbell of its submission queue.
        """
        qp, decided = self.route(cmd)
        if decided:
            extra_ns += self.config.redirect_ns
        self.engine.schedule(extra_ns + self.config.doorbell_ns, HOST_ID, 'doorbell', cmd, qp, extra_ns)

    def route(self, cmd):
        """
        Pick the submission queue for ``cmd``. Returns (queue pair, whether a
        redirect decision was drawn).
        """
        normal = self.normal_queues(cmd.device)
        qp = normal[cmd.cmd_id % len(normal)]
        bindings = [b for b in self.bindings.values() if b.borrower == cmd.device and self._fresh(b)]
        if not bindings:
            return qp, False
        self.counts['redirect_decisions'] += 1
        draw = self.engine.rng.draw('redirect')
        cumulative = 0.0
        for binding in bindings:
            cumulative += binding.probability
            if draw < cumulative:
                cmd.redirected = True
                self.counts['redirected'] += 1
                return binding.shadow, True
        return qp, True

    def _fresh(self, binding):
        if binding.probability is None or self.fabric is None:
            return False
        written = self.fabric.last_write(binding.descriptor_address)
        horizon = self.config.refresh_ns * self.config.stale_windows
        return written is not None and self.engine.now - written <= horizon

    def on_doorbell(self, cmd, qp, host_ns):
        cmd.charge_until(self.engine.now, host=host_ns, host_ssd=self.config.doorbell_ns)
        if self._outstanding.get(cmd.cmd_id) is not cmd:
            return
        if qp.owner in self.failed_devices:
            self._reroute(cmd, qp)
            return
        if qp.full:
            self._waiting[qp].append(cmd)
            self.counts['sq_full'] += 1
            return
        self._enqueue(cmd, qp)

    def _enqueue(self, cmd, qp):
        qp.sq.append(cmd)
        qp.outstanding += 1
        cmd.sqid = qp.sqid
        self._queue_of[cmd] = qp
        self.devices[qp.owner].cores.kick()

    def fetch_for(self, device_id):
        """
        Next command the SSD's arbiter picks from its submission queues, or None.
        """
        found = self.arbiters[device_id].next()
        return None if found is None else found[1]

    # Completion

    def on_cq_post(self, cmd, attempt):
        now = self.engine.now
        cmd.charge_until(now, host_ssd=self.config.interrupt_ns)
        qp = self._queue_of.pop(cmd, None)
        if qp is not None:
            qp.outstanding -= 1
            self._admit_waiting(qp)
        if self._outstanding.get(cmd.cmd_id) is not cmd or cmd.attempt != attempt:
            self.counts['stale_completions'] += 1
            return
        if qp is not None and qp.owner != cmd.executor:
            raise InvariantViolation(
                f'command {cmd.cmd_id} executed by {cmd.executor} completed on the CQ of {qp.owner}'
            )
        self.cores.submit(self.config.half_command_cycles, self._deliver, cmd)

    def _admit_waiting(self, qp):
        waiting = self._waiting[qp]
        while waiting and not qp.full:
            self._enqueue(waiting.popleft(), qp)

    def finish(self, cmd):
        """
        Complete a command the host resolved without a queue (a split read).
        """
        self.cores.submit(self.config.half_command_cycles, self._deliver, cmd)

    def _fail(self, cmd):
        cmd.status = CommandStatus.ERROR
        self.counts['errors'] += 1
        self.finish(cmd)

    def _deliver(self, cmd):
        now = self.engine.now
        cmd.charge_until(now, host=self._half_ns)
        if self._outstanding.get(cmd.cmd_id) is not cmd:
            return
        if cmd.cmd_id in self._delivered:
            raise InvariantViolation(f'command {cmd.cmd_id} completed twice')
        self._delivered.add(cmd.cmd_id)
        del self._outstanding[cmd.cmd_id]
        cmd.complete_time = now
        self.counts['completed'] += 1
        if self.vh is not None and self.vh.on_complete(cmd):
            return
        if self.collector is not None and not cmd.internal:
            self.collector.record(cmd)
        if cmd.on_complete is not None:
            cmd.on_complete(cmd)

    @property
    def in_flight(self):
        return len(self._outstanding)

    # Shadow queues

    def free_shadow_queue(self, device_id, exclude=()):
        for qp in self.queues.get(device_id, ()):
            if qp.is_shadow and qp.binding is None and qp.cqid not in exclude:
                return qp
        return None

    def borrower_queue(self, device_id):
        """
        The normal queue a borrower binds: its lowest-id nonempty one, else its first.
        """
        normal = self.normal_queues(device_id)
        return next((qp for qp in normal if qp.sq), normal[0])

    def bind_shadow(self, borrower, lender, shadow_cqid, descriptor_address):
        shadow = self.queue(lender, shadow_cqid)
        if not shadow.is_shadow or shadow.binding is not None:
            raise QueueBindingError(f'queue {shadow_cqid} of {lender} cannot be bound to {borrower}')
        borrower_qp = self.borrower_queue(borrower)
        shadow.binding = (borrower, borrower_qp.sqid)
        binding = ShadowBinding(
            borrower, lender, shadow, borrower_qp, descriptor_address, bound_at=self.engine.now,
        )
        self.bindings[(lender, shadow_cqid)] = binding
        self._refresh_borrower(borrower)
        logger.info('[host] bound %s queue %s to shadow queue %s of %s',
                    borrower, borrower_qp.sqid, shadow_cqid, lender)
        return binding

    def unbind_shadow(self, lender, shadow_cqid):
        binding = self.bindings.pop((lender, shadow_cqid), None)
        if binding is None:
            return None
        binding.shadow.binding = None
        logger.info('[host] unbound shadow queue %s of %s from %s', shadow_cqid, lender, binding.borrower)
        self._refresh_borrower(binding.borrower)
        return binding

    def on_refresh(self):
        self.engine.schedule(self.config.refresh_ns, HOST_ID, 'refresh')
        for borrower in sorted({binding.borrower for binding in self.bindings.values()}):
            self._refresh_borrower(borrower)

    def _refresh_borrower(self, borrower):
        """
        Re-read the descriptors of ``borrower``'s bindings and recompute the
        per-lender redirect probabilities.
        """
        live = []
        for key, binding in list(self.bindings.items()):
            if binding.borrower != borrower:
                continue
            descriptor = self._descriptor(binding)
            if descriptor is None or not descriptor.valid or not descriptor.claimed:
                self.unbind_shadow(*key)
                continue
            live.append((binding, descriptor))
        if not live:
            return
        ratios = [self._ratio(binding, descriptor) for binding, descriptor in live]
        for (binding, _), probability in zip(live, split_redirect(ratios)):
            binding.probability = smooth(binding.probability, probability, self.config.redirect_smoothing)
            self.redirect_log.append({
                'time_ns': self.engine.now,
                'borrower': borrower,
                'lender': binding.lender,
                'probability': round(binding.probability, 6),
            })

    def _descriptor(self, binding):
        if self.fabric is None:
            return None
        address = binding.descriptor_address
        return IdleResourceDescriptor.from_words(self.fabric.read_word(address), self.fabric.read_word(address + 8))

    def _ratio(self, binding, descriptor):
        borrower_weights = sum(qp.weight for qp in self.normal_queues(binding.borrower))
        lender_weights = sum(
            qp.weight for qp in self.queues[binding.lender] if not qp.is_shadow or qp.binding is not None
        )
        ratio, _ = redirect_probability(
            descriptor, binding.borrower_qp.weight, borrower_weights, binding.shadow.weight, lender_weights,
        )
        return ratio

    # Failures

    def on_keepalive(self):
        self.engine.schedule(self.config.keepalive_ns, HOST_ID, 'keepalive')
        for device_id, device in self.devices.items():
            if device_id in self.failed_devices:
                continue
            if device.failed:
                self._misses[device_id] += 1
                if self._misses[device_id] >= self.config.keepalive_misses:
                    self.declare_failed(device_id)
            else:
                self._misses[device_id] = 0

    def declare_failed(self, device_id):
        """
        Give up on ``device_id``: fail its commands, move commands queued on it
        for other SSDs back to their own queues and let harvesting recover.
        """
        if device_id in self.failed_devices:
            return
        self.failed_devices.add(device_id)
        logger.info('[host] %s declared failed at %s ns', device_id, self.engine.now)
        if self.fabric is not None:
            self.fabric.locks.release_all(device_id)
        for lender, cqid in [key for key, b in self.bindings.items() if device_id in (b.lender, b.borrower)]:
            self.unbind_shadow(lender, cqid)
        for listener in list(self.failure_listeners):
            listener(device_id)
        for cmd in sorted(self._outstanding.values(), key=lambda c: c.cmd_id):
            qp = self._queue_of.get(cmd)
            if cmd.device == device_id:
                self._withdraw(cmd, qp)
                self._fail(cmd)
            elif qp is not None and qp.owner == device_id:
                self._withdraw(cmd, qp)
                self._reroute(cmd, qp)

    def _withdraw(self, cmd, qp):
        if qp is None:
            return
        if cmd in qp.sq:
            qp.sq.remove(cmd)
        elif cmd in self._waiting[qp]:
            self._waiting[qp].remove(cmd)
            return
        self._queue_of.pop(cmd, None)
        qp.outstanding -= 1

    def _reroute(self, cmd, qp):
        """
        Resubmit a command that sat on a dead SSD's queue to its own SSD.
        """
        if cmd.device in self.failed_devices:
            self._fail(cmd)
            return
        retry = cmd.retry()
        retry.mark = self.engine.now
        retry.latency = cmd.latency
        self._outstanding[cmd.cmd_id] = retry
        self.counts['resubmitted'] += 1
        target = self.normal_queues(cmd.device)[0]
        self.engine.schedule(self.config.doorbell_ns, HOST_ID, 'doorbell', retry, target, 0)

    def snapshot(self):
        return {
            'counts': dict(sorted(self.counts.items())),
            'in_flight': self.in_flight,
            'failed_devices': sorted(self.failed_devices),
            'bindings': [
                {'borrower': b.borrower, 'lender': b.lender, 'shadow_cqid': b.shadow.cqid,
                 'probability': b.probability}
                for b in self.bindings.values()
            ],
            'host_core_busy_ps': self.cores.busy_ps,
        }
