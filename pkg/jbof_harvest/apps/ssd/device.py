"""
One disaggregated SSD.

The compute-end is a pool of firmware cores; the data-end is the flash
backbone, the DMA engine (the host link in each direction), the write buffer
and the data-end agent queue through which a remote compute-end reaches them.

A command is always carried out on the data-end of the SSD that holds its data
(the *target*). Its firmware steps run on the cores of the *executor*: the
target itself, or a lender that fetched it from a shadow queue. For a remote
executor, mapping-table accesses and lock traffic cross the fabric, and every
DMA or flash operation is first posted to the target's agent queue.

Read pipeline: fetch and parse, translate each 4 KB slice, look up each mapping
region under its read lock, issue DMA and flash work per slice, flash reads,
DMA to the host, completion. Writes are acknowledged once their data sits in
the write buffer; full 16 KB pages are programmed in the background and the
mapping is updated under the region's write lock when a program finishes.
"""
import logging
from collections import Counter, deque

import attr

from jbof_harvest.apps.core.constants import HOST_ID, LPN_SIZE, PS_PER_NS
from jbof_harvest.apps.core.exceptions import InvariantViolation
from jbof_harvest.apps.core.utils import ceil_div, ps_to_ns_ceil, transfer_ns
from jbof_harvest.apps.engine.stations import Calendar, FifoLine, Job, ServiceStation
from jbof_harvest.apps.fabric.constants import LockMode, RegionKind
from jbof_harvest.apps.flash.api import FlashBackbone
from jbof_harvest.apps.flash.constants import FlashOpKind
from jbof_harvest.apps.flash.data import FlashOp
from jbof_harvest.apps.harvest.constants import REDO_COMMIT_PS

from .constants import (
    AGENT_MESSAGE_SIZE,
    ENTRIES_PER_MAP_PAGE,
    MAP_ENTRY_SIZE,
    MAP_PAGE_SIZE,
    UNMAPPED,
    BusyTag,
    CommandStatus,
    TranslateOutcome,
)
from .data import SsdConfig
from .ftl import PageMappingFtl
from .mapping import EffectKind, MappingState
from .monitor import ResourceMonitor

logger = logging.getLogger(__name__)


@attr.s(slots=True, eq=False)
class CommandContext:
    """
    Per-command scratch state while a command moves through the pipeline.
    """
    cmd = attr.ib()
    executor = attr.ib()
    waiting = attr.ib(type=int, default=0)
    regions = attr.ib(factory=list)
    ready = attr.ib(type=int, default=0)
    parts = attr.ib(factory=dict)
    pages = attr.ib(factory=list)
    data = attr.ib(factory=list)
    total_ps = attr.ib(type=int, default=0)
    longest_ps = attr.ib(type=int, default=0)

    def processor_ns(self, servers):
        """
        Critical-path core time of the jobs run since the last call.
        """
        busy = max(self.longest_ps, self.total_ps // servers)
        self.total_ps = self.longest_ps = 0
        return ps_to_ns_ceil(busy)


@attr.s(slots=True, eq=False)
class ProgramContext:
    ppn = attr.ib(type=int)
    group = attr.ib()
    regions = attr.ib()
    index = attr.ib(type=int, default=0)


class SsdDevice:
    """
    A simulated SSD registered with the engine under ``device_id``.

    Args:
        engine: the simulation engine.
        device_id (str): actor id, e.g. ``ssd3``.
        config (SsdConfig): hardware and firmware parameters.
        fabric (CxlFabric): the shared fabric; the mapping table and agent
            queue are exported into it.
        cores (ServiceStation): run firmware on another processor (the host,
            for open-channel drives) instead of onboard cores.
        mapping_regions (int): mapping-cache capacity override, in regions.
    """

    def __init__(self, engine, device_id, config=None, fabric=None, cores=None, mapping_regions=None):
        self.engine = engine
        self.id = device_id
        self.config = config or SsdConfig()
        self.fabric = fabric
        self.firmware = self.config.firmware
        self.failed = False
        self.host = None
        self.peers = {device_id: self}
        engine.register(device_id, self)

        self.flash = FlashBackbone(engine, self.config.geometry, self.config.timing, name=device_id)
        self.ftl = PageMappingFtl(
            self.config.geometry,
            overprovision=self.config.overprovision,
            gc_low=self.config.gc_low_watermark,
            gc_high=self.config.gc_high_watermark,
            prefill=self.config.prefill,
        )
        for address, pages in self.ftl.prefilled_blocks():
            self.flash.mark_programmed(address.block_key, pages)

        dram_bytes = self.config.dram_bytes
        self.map_slots = dram_bytes // MAP_PAGE_SIZE
        capacity = self.map_slots if mapping_regions is None else mapping_regions
        self.mapping = MappingState(self.ftl, capacity)
        if self.config.warm_mapping:
            self.mapping.warm()

        if cores is None:
            compute = self.config.compute
            cores = ServiceStation(engine, f'{device_id}.cores', compute.core_count, compute.core_frequency, owner=self)
            cores.set_fetch(self.fetch_job)
        self.cores = cores
        self.uplink = Calendar()
        self.downlink = Calendar()
        self.agent_queue = FifoLine(self.config.agent_unwrap_ps, self.config.agent_queue_depth)
        if fabric is not None:
            self.map_region = fabric.register_region(device_id, dram_bytes, RegionKind.MAPPING_TABLE)
            self.agent_region = fabric.register_region(
                device_id, self.config.agent_queue_depth * AGENT_MESSAGE_SIZE, RegionKind.MESSAGE_QUEUE,
            )

        self.buffer = {}
        self.buffer_free = self.config.write_buffer_bytes
        self.truth = {}
        self._version = 0
        self._program_queue = deque()
        self._parked = deque()
        self._flush_timer = None
        self._collecting = set()

        self.offloaded_ps = 0
        self.agent_ops = 0
        self.dram_bytes = 0
        self.counts = Counter()
        self.effect_counts = Counter()
        self.offsite_write_ns = 0
        self.monitor = ResourceMonitor(self, self.config.window_ns)
        self.agent = None
        # Logical pages at the top of the space kept from workloads (virtual harvesting staging).
        self.reserved_lpns = 0

    def __repr__(self):
        return f'<SsdDevice {self.id}>'

    @property
    def user_lpns(self):
        return self.ftl.lpn_count - self.reserved_lpns

    # Engine entry points

    def on_resume(self, callback, args):
        callback(*args)

    def on_lock_grant(self, callback, args):
        callback(*args)

    def on_flush_buffer(self):
        self._flush_timer = None
        if self._program_queue:
            group = [self._program_queue.popleft() for _ in range(min(len(self._program_queue), self.ftl.slots_per_page))]
            self._program_group(group)
        self._schedule_programs()

    def on_program_done(self, ppn, group):
        regions = sorted({lpn // ENTRIES_PER_MAP_PAGE for lpn, _, _ in group})
        self._lock_for_commit(ProgramContext(ppn, group, regions))

    def on_harvest_window(self):
        if self.agent is not None:
            self.agent.on_window()

    def fail(self):
        self.failed = True
        logger.info('[ssd] %s failed at %s ns', self.id, self.engine.now)

    # Admission

    def fetch_job(self):
        """
        Pull source of this SSD's cores: the next command the host arbitrates
        to one of its queues, normal or shadow.
        """
        if self.host is None:
            return None
        cmd = self.host.fetch_for(self.id)
        if cmd is None:
            return None
        return self.peers[cmd.device].admission_job(cmd, self)

    def admission_job(self, cmd, executor):
        ctx = CommandContext(cmd, executor)
        cmd.executor = executor.id
        service = executor.cores.cycles_ps(executor.firmware.cycles('fetch_parse'))
        self._account(ctx, service)
        remote = executor is not self
        return Job(service, self._resume, (self._parsed, ctx), BusyTag.REMOTE if remote else None)

    def _resume(self, callback, *args):
        # Continuations of this SSD's commands may run on a lender's cores.
        if not self.failed:
            callback(*args)

    def _account(self, ctx, service_ps):
        ctx.total_ps += service_ps
        ctx.longest_ps = max(ctx.longest_ps, service_ps)
        if ctx.executor is not self:
            self.offloaded_ps += service_ps

    def _run(self, ctx, cycles, callback, *args):
        executor = ctx.executor
        service = executor.cores.cycles_ps(cycles)
        self._account(ctx, service)
        remote = executor is not self
        executor.cores.submit_ps(
            service, self._resume, callback, *args, tag=BusyTag.REMOTE if remote else None, guest=remote,
        )

    def _run_each(self, ctx, cycle_list, callback):
        """
        Run one job per entry of ``cycle_list``; ``callback(ctx)`` follows the last.
        """
        ctx.waiting = len(cycle_list)
        if not cycle_list:
            callback(ctx)
            return
        for cycles in cycle_list:
            self._run(ctx, cycles, self._job_done, ctx, callback)

    def _job_done(self, ctx, callback):
        ctx.waiting -= 1
        if ctx.waiting == 0:
            callback(ctx)

    def _notify(self, ctx, at, callback, *args):
        """
        Continue on the executor at ``at`` (plus one fabric hop when remote).
        """
        executor = ctx.executor
        if executor is not self:
            at += self.fabric.config.one_way_ns
        self.engine.schedule_at(at, executor.id, 'resume', self._resume, (callback, *args))

    def _parsed(self, ctx):
        cmd = ctx.cmd
        now = self.engine.now
        cmd.charge_until(now, processor=ctx.processor_ns(ctx.executor.cores.servers))
        if cmd.lpn < 0 or cmd.lpn + cmd.count > self.ftl.lpn_count:
            logger.warning('[ssd] %s: command %s addresses pages beyond %s', self.id, cmd.cmd_id, self.ftl.lpn_count)
            cmd.status = CommandStatus.ERROR
            self._run(ctx, ctx.executor.firmware.cycles('completion'), self._completed, ctx)
            return
        firmware = ctx.executor.firmware
        cycles = [firmware.cycles('translate')] * cmd.count
        ctx.regions = sorted({lpn // ENTRIES_PER_MAP_PAGE for lpn in cmd.lpns})
        if cmd.is_read and ctx.executor is not self:
            cycles += [firmware.cycles('sync_overhead')] * len(ctx.regions)
        self._run_each(ctx, cycles, self._translated)

    def _translated(self, ctx):
        cmd = ctx.cmd
        cmd.charge_until(self.engine.now, processor=ctx.processor_ns(ctx.executor.cores.servers))
        if cmd.is_read:
            self._look_up_regions(ctx)
        else:
            self._issue(ctx)

    # Mapping lookups (reads)

    def _look_up_regions(self, ctx):
        ctx.waiting = len(ctx.regions)
        ctx.ready = self.engine.now
        ctx.parts = {}
        ctx.data = [0] * ctx.cmd.count
        executor = ctx.executor
        for region in ctx.regions:
            holder = (executor.id, ctx.cmd.cmd_id, ctx.cmd.attempt, region)
            granted = self.fabric.locks.acquire(
                holder, executor.id, self.id, region, LockMode.READ,
                self._resume, self._access_region, ctx, region, holder,
            )
            if granted:
                self._access_region(ctx, region, holder)

    def map_address(self, region, lpn):
        offset = (region % self.map_slots) * MAP_PAGE_SIZE + (lpn % ENTRIES_PER_MAP_PAGE) * MAP_ENTRY_SIZE
        return self.map_region.base + offset

    def _access_region(self, ctx, region, holder):
        now = self.engine.now
        executor = ctx.executor
        remote = executor is not self
        cmd = ctx.cmd
        first = max(cmd.lpn, region * ENTRIES_PER_MAP_PAGE)
        entries = min(cmd.lpn + cmd.count, (region + 1) * ENTRIES_PER_MAP_PAGE) - first
        parts = {'inter_ssd': self.fabric.config.round_trip_ns if remote else 0, 'dram': 0, 'flash': 0}
        outcome = self.mapping.access(region)
        self.counts[outcome] += 1
        if outcome == TranslateOutcome.HIT:
            self.dram_bytes += entries * MAP_ENTRY_SIZE
            if remote:
                done = self.fabric.remote_read(executor.id, self.map_address(region, first)).done
                parts['inter_ssd'] += done - now
            else:
                done = now + self.config.compute.dram_access_ns
                parts['dram'] = done - now
        elif outcome == TranslateOutcome.OFFSITE_HIT:
            address = self.mapping.offsite_address(region, first)
            done = self.fabric.remote_read(executor.id, address).done
            bucket = 'dram' if self.mapping.offsite_lender(region) == executor.id else 'inter_ssd'
            parts[bucket] += done - now
        else:
            op = FlashOp(FlashOpKind.READ, self.ftl.address(self.ftl.map_page_ppn(region)))
            done = self._flash_submit(op, executor)
            parts['flash'] = op.service_ns
        self.engine.schedule_at(
            done, executor.id, 'resume', self._resume, (self._region_done, ctx, region, holder, parts, outcome),
        )

    def _region_done(self, ctx, region, holder, parts, outcome):
        now = self.engine.now
        cmd = ctx.cmd
        if outcome == TranslateOutcome.LOCAL_MISS:
            self.dram_bytes += MAP_PAGE_SIZE
            self.apply_effects(self.mapping.install(region))
        first = max(cmd.lpn, region * ENTRIES_PER_MAP_PAGE)
        last = min(cmd.lpn + cmd.count, (region + 1) * ENTRIES_PER_MAP_PAGE)
        for lpn in range(first, last):
            token, ppn = self._resolve(lpn)
            ctx.data[lpn - cmd.lpn] = token
            if ppn is not None and ppn not in ctx.pages:
                ctx.pages.append(ppn)
        release = self.fabric.locks.release(holder, self.id, region)
        parts['inter_ssd'] += release
        if now + release >= ctx.ready:
            ctx.ready = now + release
            ctx.parts = parts
        ctx.waiting -= 1
        if ctx.waiting == 0:
            if ctx.ready > now:
                self.engine.schedule_at(
                    ctx.ready, ctx.executor.id, 'resume', self._resume, (self._regions_resolved, ctx),
                )
            else:
                self._regions_resolved(ctx)

    def _resolve(self, lpn):
        """
        (data identity, physical page to read or None) of one logical page,
        checked against the integrity oracle and the live map.
        """
        entry = self.buffer.get(lpn)
        if entry is not None:
            token, ppn = entry[0], None
        else:
            slot = self.mapping.lookup(lpn)
            if slot != self.ftl.lookup(lpn):
                raise InvariantViolation(
                    f'{self.id}: cached mapping of lpn {lpn} is {slot}, live copy at {self.ftl.lookup(lpn)}'
                )
            if slot == UNMAPPED:
                token, ppn = 0, None
            else:
                token, ppn = self.ftl.contents.get(slot, 0), slot // self.ftl.slots_per_page
        expected = self.truth.get(lpn, 0)
        if token != expected:
            raise InvariantViolation(f'{self.id}: read of lpn {lpn} returned {token}, last write was {expected}')
        return token, ppn

    def _regions_resolved(self, ctx):
        ctx.cmd.charge_until(self.engine.now, **ctx.parts)
        self._issue(ctx)

    # DMA and flash issue

    def _issue(self, ctx):
        firmware = ctx.executor.firmware
        cycles = [firmware.cycles('dma_issue')] * ctx.cmd.count
        for i in range(len(ctx.pages)):
            cycles[i % len(cycles)] += firmware.cycles('flash_issue')
        self._run_each(ctx, cycles, self._issued)

    def _issued(self, ctx):
        cmd = ctx.cmd
        now = self.engine.now
        cmd.charge_until(now, processor=ctx.processor_ns(ctx.executor.cores.servers))
        if not cmd.is_read:
            if self._buffer_admits(cmd.nbytes):
                self._start_write_dma(ctx)
            else:
                self.counts['parked'] += 1
                self._parked.append(ctx)
            return
        executor = ctx.executor
        ready = now
        flash_ns = 0
        for ppn in ctx.pages:
            op = FlashOp(FlashOpKind.READ, self.ftl.address(ppn))
            done = self._flash_submit(op, executor)
            if done >= ready:
                ready, flash_ns = done, op.service_ns
        agent_ns = 0
        if executor is not self:
            exit_ns = self._agent_exit(executor)
            agent_ns = exit_ns - now
            ready = max(ready, exit_ns)
        duration = transfer_ns(cmd.nbytes, self.config.host_read_bandwidth)
        start = self.uplink.reserve(now, ready, duration)
        self.counts['read_bytes'] += cmd.nbytes
        parts = {'flash': flash_ns, 'inter_ssd': agent_ns, 'host_ssd': duration}
        self.engine.schedule_at(start + duration, self.id, 'resume', self._data_moved, (ctx, parts))

    def _flash_submit(self, op, executor):
        if executor is self:
            return self.flash.submit(op)
        return self.flash.submit(op, earliest=self._agent_exit(executor))

    def _agent_exit(self, executor):
        """
        Post one wrapped operation from a remote compute-end; returns when the
        data-end has dequeued and unwrapped it.
        """
        arrival = self.fabric.remote_write(executor.id, self.agent_region.base, AGENT_MESSAGE_SIZE).done
        self.agent_ops += 1
        return ceil_div(self.agent_queue.admit(arrival * PS_PER_NS), PS_PER_NS)

    # Write buffer

    def _buffer_admits(self, nbytes):
        return self.buffer_free >= nbytes or self.buffer_free == self.config.write_buffer_bytes

    def _start_write_dma(self, ctx):
        cmd = ctx.cmd
        now = self.engine.now
        self.buffer_free -= cmd.nbytes
        earliest = now
        if ctx.executor is not self:
            earliest = self._agent_exit(ctx.executor)
        duration = transfer_ns(cmd.nbytes, self.config.host_write_bandwidth)
        start = self.downlink.reserve(now, earliest, duration)
        parts = {'inter_ssd': earliest - now, 'host_ssd': duration}
        self.engine.schedule_at(start + duration, self.id, 'resume', self._data_moved, (ctx, parts))

    def _wake_parked(self):
        while self._parked and self._buffer_admits(self._parked[0].cmd.nbytes):
            self._start_write_dma(self._parked.popleft())

    def _data_moved(self, ctx, parts):
        cmd = ctx.cmd
        if cmd.is_read:
            cmd.data = ctx.data
        else:
            for i, lpn in enumerate(cmd.lpns):
                self._version += 1
                token = cmd.token_for(i)
                self.buffer[lpn] = (token, self._version)
                self.truth[lpn] = token
                self._program_queue.append((lpn, token, self._version))
            self.counts['write_bytes'] += cmd.nbytes
            self.dram_bytes += cmd.nbytes
            self._schedule_programs()
        if ctx.executor is not self:
            parts['inter_ssd'] = parts.get('inter_ssd', 0) + self.fabric.config.one_way_ns
        self._notify(ctx, self.engine.now, self._data_end_done, ctx, parts)

    def _data_end_done(self, ctx, parts):
        ctx.cmd.charge_until(self.engine.now, **parts)
        self._run(ctx, ctx.executor.firmware.cycles('completion'), self._completed, ctx)

    def _completed(self, ctx):
        cmd = ctx.cmd
        cmd.charge_until(self.engine.now, processor=ctx.processor_ns(ctx.executor.cores.servers))
        if cmd.status == CommandStatus.PENDING:
            cmd.status = CommandStatus.SUCCESS
        self.counts['completed'] += 1
        self.engine.schedule(self.host.config.interrupt_ns, HOST_ID, 'cq_post', cmd, cmd.attempt)

    # Background programming

    def _schedule_programs(self):
        slots = self.ftl.slots_per_page
        queue = self._program_queue
        while len(queue) >= slots:
            self._program_group([queue.popleft() for _ in range(slots)])
        if queue and self._flush_timer is None:
            self._flush_timer = self.engine.schedule(self.config.buffer_flush_ns, self.id, 'flush_buffer')
        elif not queue and self._flush_timer is not None:
            self._flush_timer.cancel()
            self._flush_timer = None

    def _program_group(self, group):
        self.cores.submit(self.firmware.cycles('flash_issue'), self._program_page, group, tag=BusyTag.BACKGROUND)

    def _program_page(self, group):
        ppn = self.ftl.allocate()
        done = self.flash.submit(FlashOp(FlashOpKind.PROGRAM, self.ftl.address(ppn)))
        self.ftl.programs['data'] += 1
        self.dram_bytes += self.config.geometry.page_size
        self.engine.schedule_at(done, self.id, 'program_done', ppn, group)
        self._maybe_collect(ppn % self.ftl.dies)

    def _commit_holder(self, ctx, region):
        return (self.id, 'program', ctx.ppn, region)

    def _lock_for_commit(self, ctx):
        while ctx.index < len(ctx.regions):
            region = ctx.regions[ctx.index]
            ctx.index += 1
            granted = self.fabric.locks.acquire(
                self._commit_holder(ctx, region), self.id, self.id, region, LockMode.WRITE,
                self._resume, self._lock_for_commit, ctx,
            )
            if not granted:
                return
        self._commit_program(ctx)

    def _commit_program(self, ctx):
        slots = self.ftl.slots_per_page
        effects = []
        for offset, (lpn, token, version) in enumerate(ctx.group):
            entry = self.buffer.get(lpn)
            if entry is None or entry[1] != version:
                continue
            slot = ctx.ppn * slots + offset
            self.ftl.remap(lpn, slot, token=token)
            effects.extend(self.mapping.update(lpn, slot))
            del self.buffer[lpn]
        self.ftl.program_done(ctx.ppn)
        # Entry updates in borrowed DRAM are durable once their redo record commits;
        # the regions stay locked and the buffer space held until then.
        offsite = [effect for effect in effects if effect.kind == EffectKind.OFFSITE_WRITE]
        self.apply_effects([effect for effect in effects if effect.kind != EffectKind.OFFSITE_WRITE])
        done = self.apply_effects(offsite)
        if done > self.engine.now:
            self.engine.schedule_at(done, self.id, 'resume', self._commit_done, (ctx,))
        else:
            self._commit_done(ctx)

    def _commit_done(self, ctx):
        for region in ctx.regions:
            self.fabric.locks.release(self._commit_holder(ctx, region), self.id, region)
        self.buffer_free += len(ctx.group) * LPN_SIZE
        self._wake_parked()

    # Garbage collection and mapping traffic

    def _maybe_collect(self, die):
        if self.ftl.needs_gc(die) and die not in self._collecting:
            self.collect(die)

    def collect(self, die):
        """
        Greedy garbage collection on one die; relocation traffic is timed on
        flash and the moved pages are remapped in the mapping cache.
        """
        self._collecting.add(die)
        try:
            plan = self.ftl.collect(die)
            ops = [FlashOp(FlashOpKind.READ, self.ftl.address(ppn)) for ppn in plan.reads]
            ops += [FlashOp(FlashOpKind.PROGRAM, self.ftl.address(ppn)) for ppn in plan.programs]
            ops += [FlashOp(FlashOpKind.ERASE, address) for address in plan.erases]
            for op in ops:
                self.flash.submit(op)
            effects = []
            for lpn, slot in plan.remaps:
                effects.extend(self.mapping.update(lpn, slot, install=False))
            self.counts['gc_runs'] += 1
            if ops:
                self.cores.submit(
                    self.firmware.cycles('flash_issue', len(ops)), self._noop, tag=BusyTag.BACKGROUND,
                )
            self.apply_effects(effects)
        finally:
            self._collecting.discard(die)
        return plan

    @staticmethod
    def _noop():
        return None

    def apply_effects(self, effects):
        """
        Time the flash and fabric traffic of mapping-cache changes. Returns when
        the last of it completes.
        """
        now = self.engine.now
        done = now
        written_back = set()
        for effect in effects:
            kind = effect.kind
            end = now
            if kind == EffectKind.WRITEBACK:
                if effect.region in written_back:
                    continue
                written_back.add(effect.region)
                ppn = self.ftl.relocate_map_page(effect.region)
                end = self.flash.submit(FlashOp(FlashOpKind.PROGRAM, self.ftl.address(ppn)))
                self._maybe_collect(ppn % self.ftl.dies)
            elif kind == EffectKind.MAP_READ:
                ppn = self.ftl.map_page_ppn(effect.region)
                end = self.flash.submit(FlashOp(FlashOpKind.READ, self.ftl.address(ppn)))
                self.dram_bytes += MAP_PAGE_SIZE
            elif kind in (EffectKind.DEMOTE, EffectKind.SEGMENT_FLUSH):
                if effect.nbytes:
                    end = self.fabric.transfer(self.id, effect.address, effect.nbytes)
            elif kind == EffectKind.OFFSITE_WRITE:
                access = self.fabric.remote_write(self.id, effect.address, effect.nbytes)
                end = access.done + ps_to_ns_ceil(REDO_COMMIT_PS)
                self.offsite_write_ns += end - now
            self.effect_counts[kind] += 1
            done = max(done, end)
        return done

    # Reporting

    @property
    def write_amplification(self):
        logical = self.counts['write_bytes']
        if not logical:
            return 0.0
        physical = self.flash.op_counts[FlashOpKind.PROGRAM] * self.config.geometry.page_size
        return physical / logical

    def counters(self):
        return {
            'completed': self.counts['completed'],
            'read_bytes': self.counts['read_bytes'],
            'write_bytes': self.counts['write_bytes'],
            'parked_writes': self.counts['parked'],
            'gc_runs': self.counts['gc_runs'],
            'erases': self.ftl.erases,
            'programs': dict(self.ftl.programs),
            'write_amplification': round(self.write_amplification, 6),
            'agent_ops': self.agent_ops,
            'offloaded_ps': self.offloaded_ps,
            'core_busy_ps': self.cores.busy_ps,
            'dram_bytes': self.dram_bytes,
            'translate': {
                outcome: self.counts[outcome]
                for outcome in (TranslateOutcome.HIT, TranslateOutcome.OFFSITE_HIT, TranslateOutcome.LOCAL_MISS)
            },
            'mapping_effects': dict(sorted(self.effect_counts.items())),
            'offsite_write_ns': self.offsite_write_ns,
        }

    def snapshot(self, history=10):
        """
        Structured debugging dump of this SSD.
        """
        return {
            'device': self.id,
            'failed': self.failed,
            'now_ns': self.engine.now,
            'mapping': self.mapping.snapshot(),
            'free_blocks': self.ftl.free_blocks(),
            'buffer_free_bytes': self.buffer_free,
            'buffered_pages': len(self.buffer),
            'flash': self.flash.counters(),
            'counters': self.counters(),
            'utilization': [sample.as_dict() for sample in self.monitor.history[-history:]],
        }

