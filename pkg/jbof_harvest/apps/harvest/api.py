"""
The harvesting daemon of each SSD and the registry that ties them together.

Each window an SSD's agent samples its monitor, runs a short daemon job on its
own cores, and then acts on the trigger policies: it publishes or withdraws
offers in its descriptor table, claims offers of other SSDs, refreshes the
utilization fields the host uses for redirection, and releases sessions whose
burst is over.
"""
import logging
from math import ceil

import attr

from jbof_harvest.apps.core.constants import MB
from jbof_harvest.apps.fabric.constants import RegionKind
from jbof_harvest.apps.ssd.constants import MAP_PAGE_SIZE, REGIONS_PER_SEGMENT, SEGMENT_SIZE, BusyTag

from .constants import LOG_PAGE_SIZE, UNCLAIMED, Action, HarvestEvent, ResourceType, SessionState
from .data import HarvestPolicy, HarvestSession, Offer
from .descriptors import DescriptorTable, IdleResourceDescriptor
from .exceptions import HarvestError
from .mrc import ShardsMrc
from .policy import decide_dram_action, decide_processor_action

logger = logging.getLogger(__name__)

SEGMENT_MB = SEGMENT_SIZE // MB


class HarvestRegistry:
    """
    Every agent on the fabric, the sessions between them and the harvest timeline.
    """

    def __init__(self, engine, fabric, host=None):
        self.engine = engine
        self.fabric = fabric
        self.host = host
        self.agents = {}
        self.sessions = []
        self.timeline = []
        if host is not None:
            host.failure_listeners.append(self.on_device_failed)

    def add(self, agent):
        if len(self.agents) >= UNCLAIMED:
            raise HarvestError(f'at most {UNCLAIMED} SSDs can take part in harvesting')
        agent.index = len(self.agents)
        self.agents[agent.device.id] = agent

    def by_index(self, index):
        return next((agent for agent in self.agents.values() if agent.index == index), None)

    def peers_of(self, device_id):
        """
        Live agents other than ``device_id``, in SSD order.
        """
        return [
            agent for agent in self.agents.values()
            if agent.device.id != device_id and not agent.device.failed
        ]

    def open(self, kind, lender, borrower, slot, **fields):
        session = HarvestSession(
            session_id=len(self.sessions) + 1, kind=kind, lender=lender, borrower=borrower,
            slot=slot, opened_at=self.engine.now, **fields,
        )
        self.sessions.append(session)
        self.record(HarvestEvent.OPENED, session=session)
        logger.info(
            '[harvest] %s claimed %s descriptor %s of %s',
            borrower, dict(ResourceType.CHOICES)[kind], slot, lender,
        )
        return session

    def close(self, session, reason):
        if session.state == SessionState.CLOSED:
            return
        session.state = SessionState.CLOSED
        session.closed_at = self.engine.now
        self.record(HarvestEvent.CLOSED, session=session, reason=reason)
        logger.info('[harvest] session %s (%s from %s) closed: %s',
                    session.session_id, session.borrower, session.lender, reason)

    def active(self, kind=None, lender=None, borrower=None):
        return [
            session for session in self.sessions
            if session.state != SessionState.CLOSED
            and (kind is None or session.kind == kind)
            and (lender is None or session.lender == lender)
            and (borrower is None or session.borrower == borrower)
        ]

    def session_at(self, lender, slot):
        return next((s for s in self.active(lender=lender) if s.slot == slot), None)

    def record(self, event, session=None, **detail):
        entry = {'time_ns': self.engine.now, 'event': event}
        if session is not None:
            entry.update(
                session=session.session_id,
                kind=dict(ResourceType.CHOICES)[session.kind],
                lender=session.lender,
                borrower=session.borrower,
            )
        entry.update(detail)
        self.timeline.append(entry)

    def on_device_failed(self, device_id):
        """
        Failure notification from the host: recover every session the dead SSD took part in.
        """
        from .recovery import recover_borrower_failure, recover_lender_failure

        self.record(HarvestEvent.FAILURE, device=device_id)
        for agent in self.peers_of(device_id):
            recover_lender_failure(agent, device_id)
            recover_borrower_failure(agent, device_id)

    def as_dict(self):
        return {
            'sessions': [session.as_dict() for session in self.sessions],
            'timeline': list(self.timeline),
        }


class HarvestAgent:
    """
    Harvesting daemon of one SSD.
    """

    def __init__(self, device, registry, policy=None):
        self.device = device
        self.registry = registry
        self.fabric = registry.fabric
        self.policy = policy or HarvestPolicy()
        self.index = None
        self.table = DescriptorTable(self.fabric, device.id)
        self.offers = {}
        self.samples = []
        device.agent = self
        registry.add(self)
        if self.policy.dram:
            device.mapping.mrc = ShardsMrc(
                rate=self.policy.shards_rate, unit=REGIONS_PER_SEGMENT, salt=device.id,
                warm_samples=self.policy.warm_samples,
            )

    def __repr__(self):
        return f'<HarvestAgent {self.device.id}>'

    @property
    def host(self):
        return self.registry.host

    @property
    def engine(self):
        return self.device.engine

    def start(self):
        self.engine.schedule(self.device.config.window_ns, self.device.id, 'harvest_window')

    def on_window(self):
        self.engine.schedule(self.device.config.window_ns, self.device.id, 'harvest_window')
        sample = self.device.monitor.sample()
        self.device.cores.submit(self.policy.daemon_cycles, self.run_window, sample, tag=BusyTag.DAEMON)

    def run_window(self, sample):
        """
        One pass of the daemon over a completed window.
        """
        if self.device.failed:
            return
        self.samples.append(sample)
        self.refresh(sample)
        if self.policy.processor:
            self._processor_step(sample)
        if self.policy.dram:
            self._dram_step()

    # Sessions of this SSD

    def borrowed(self, kind):
        return self.registry.active(kind=kind, borrower=self.device.id)

    def lent(self, kind):
        return self.registry.active(kind=kind, lender=self.device.id)

    def offers_of(self, kind):
        return [offer for offer in self.offers.values() if offer.kind == kind and not offer.withdrawn]

    # Descriptor upkeep

    def refresh(self, sample):
        """
        Keep the utilization fields current and notice offers that went away.
        """
        for offer in self.offers_of(ResourceType.PROCESSOR):
            descriptor = self.table.read(offer.slot)
            self.table.write(offer.slot, descriptor.with_utilization(lender=sample.processor))
        for session in self.borrowed(ResourceType.PROCESSOR):
            lender = self.registry.agents[session.lender]
            descriptor, _ = lender.table.fetch(self.device.id, session.slot)
            if not descriptor.valid or descriptor.borrower_id != self.index:
                self.release(session, 'offer withdrawn')
                continue
            lender.table.write(
                session.slot, descriptor.with_utilization(borrower=sample.processor), requester=self.device.id,
            )
        for session in self.borrowed(ResourceType.DRAM):
            lender = self.registry.agents[session.lender]
            descriptor, _ = lender.table.fetch(self.device.id, session.slot)
            if not descriptor.valid or descriptor.borrower_id != self.index:
                self.release(session, 'lender reclaims its DRAM')
        for offer in [o for o in self.offers.values() if o.withdrawn]:
            if not self.table.read(offer.slot).claimed or self.registry.session_at(self.device.id, offer.slot) is None:
                self._retire(offer)

    # Processor harvesting

    def _processor_step(self, sample):
        policy = self.policy
        effective = min(1.0, sample.effective_processor)
        borrowing = self.borrowed(ResourceType.PROCESSOR)
        if borrowing:
            if effective < policy.release_watermark:
                for session in borrowing:
                    self.release(session, 'burst over')
            elif (decide_processor_action(attr.evolve(sample, processor=effective), policy.watermark) == Action.BORROW
                  and len(borrowing) < policy.borrow_cap):
                self.claim(ResourceType.PROCESSOR, sample)
            return
        if sample.own_processor > policy.watermark:
            for offer in self.offers_of(ResourceType.PROCESSOR):
                self.withdraw(offer)
        action = decide_processor_action(attr.evolve(sample, processor=sample.own_processor), policy.watermark)
        if action == Action.LEND:
            if not any(not self.table.read(o.slot).claimed for o in self.offers_of(ResourceType.PROCESSOR)):
                self.publish_processor(sample)
        elif action == Action.BORROW and not self.lent(ResourceType.PROCESSOR):
            for offer in self.offers_of(ResourceType.PROCESSOR):
                self.withdraw(offer)
            self.claim(ResourceType.PROCESSOR, sample)

    def publish_processor(self, sample):
        taken = {offer.shadow_cqid for offer in self.offers.values() if offer.shadow_cqid is not None}
        qp = self.host.free_shadow_queue(self.device.id, exclude=taken)
        if qp is None:
            return None
        descriptor = IdleResourceDescriptor.processor(lender_utilization=sample.processor, shadow_cqid=qp.cqid)
        return self._publish(Offer(ResourceType.PROCESSOR, slot=None, shadow_cqid=qp.cqid), descriptor)

    def _publish(self, offer, descriptor):
        slot = self.table.publish(descriptor)
        if slot is None:
            logger.debug('[harvest] %s descriptor table is full, offer deferred', self.device.id)
            return None
        offer.slot = slot
        self.offers[slot] = offer
        self.registry.record(
            HarvestEvent.PUBLISHED, lender=self.device.id, kind=dict(ResourceType.CHOICES)[offer.kind], slot=slot,
        )
        logger.debug('[harvest] %s published %s offer in slot %s', self.device.id, offer.kind, slot)
        return slot

    def withdraw(self, offer):
        """
        Clear the valid bit of an offer; borrowers give it back on their next window.
        """
        offer.withdrawn = True
        self.table.withdraw(offer.slot)
        self.registry.record(
            HarvestEvent.WITHDRAWN, lender=self.device.id, kind=dict(ResourceType.CHOICES)[offer.kind],
            slot=offer.slot,
        )
        if not self.table.read(offer.slot).claimed:
            self._retire(offer)

    def _retire(self, offer):
        if self.offers.get(offer.slot) is offer:
            del self.offers[offer.slot]
        if offer.kind == ResourceType.DRAM and offer.region is not None:
            self.fabric.clear(offer.region)
            mapping = self.device.mapping
            self.device.apply_effects(mapping.set_capacity(mapping.capacity + offer.regions_lent))
            offer.regions_lent = 0

    # Claiming

    def candidates(self, kind):
        """
        Valid, unclaimed offers of ``kind`` on other SSDs, best first: lowest
        lender utilization (processor) or largest capacity (DRAM), then SSD order.
        """
        taken = {session.lender for session in self.borrowed(kind)}
        found = []
        for agent in self.registry.peers_of(self.device.id):
            if agent.device.id in taken:
                continue
            for slot in range(agent.table.slots):
                descriptor, _ = agent.table.fetch(self.device.id, slot)
                if descriptor.valid and not descriptor.claimed and descriptor.resource_type == kind:
                    rank = descriptor.lender_utilization if kind == ResourceType.PROCESSOR else -descriptor.capacity_mb
                    found.append((rank, agent.index, slot, agent, descriptor))
        found.sort(key=lambda item: item[:3])
        return [(agent, slot, descriptor) for _, _, slot, agent, descriptor in found]

    def claim(self, kind, sample=None):
        """
        Claim the best offer of ``kind``; returns the new session or None.
        """
        for lender, slot, descriptor in self.candidates(kind):
            if not lender.table.claim(self.device.id, slot, descriptor, self.index):
                continue
            claimed = descriptor.evolve(borrower_id=self.index)
            if kind == ResourceType.PROCESSOR:
                return self._open_processor(lender, slot, claimed, sample)
            return self._open_dram(lender, slot, claimed)
        return None

    def _open_processor(self, lender, slot, descriptor, sample):
        borrower_qp = self.host.borrower_queue(self.device.id)
        descriptor = IdleResourceDescriptor.processor(
            lender_utilization=descriptor.lender_utilization,
            borrower_utilization=sample.processor if sample else 0.0,
            shadow_cqid=descriptor.shadow_cqid,
            directory_address=self.table.encode_address(self.device.map_region.base),
            borrower_cqid=borrower_qp.cqid,
            borrower_id=self.index,
        )
        lender.table.write(slot, descriptor, requester=self.device.id)
        self.host.bind_shadow(self.device.id, lender.device.id, descriptor.shadow_cqid, lender.table.address(slot))
        return self.registry.open(
            ResourceType.PROCESSOR, lender.device.id, self.device.id, slot,
            borrower_sqid=borrower_qp.sqid, shadow_cqid=descriptor.shadow_cqid,
        )

    def _open_dram(self, lender, slot, descriptor):
        count = descriptor.capacity_mb // SEGMENT_MB
        base = lender.table.decode_address(lender.device.id, descriptor.segment_list_address)
        log_region = self.fabric.register_region(self.device.id, count * LOG_PAGE_SIZE, RegionKind.LOG_PAGE)
        descriptor = descriptor.evolve(info=(descriptor.segment_list_address << 32)
                                       | self.table.encode_address(log_region.base))
        lender.table.write(slot, descriptor, requester=self.device.id)
        mapping = self.device.mapping
        segments = [
            mapping.add_segment(lender.device.id, index, base + index * SEGMENT_SIZE) for index in range(count)
        ]
        session = self.registry.open(
            ResourceType.DRAM, lender.device.id, self.device.id, slot,
            segments=segments, log_region=log_region,
        )
        self.registry.record(HarvestEvent.SEGMENTS_MOVED, session=session, segments=count, direction='borrowed')
        return session

    def release(self, session, reason):
        """
        Give a borrowed resource back and unclaim its descriptor.
        """
        lender = self.registry.agents[session.lender]
        if session.is_processor:
            self.host.unbind_shadow(session.lender, session.shadow_cqid)
        else:
            session.state = SessionState.DRAINING
            effects = self.device.mapping.drain(session.lender)
            self.device.apply_effects(effects)
            self.registry.record(
                HarvestEvent.SEGMENTS_MOVED, session=session, segments=len(session.segments), direction='returned',
            )
        if not lender.device.failed:
            lender.table.unclaim(self.device.id, session.slot, self.index)
        self.registry.close(session, reason)

    # DRAM harvesting

    def local_segments(self):
        return self.device.mapping.capacity // REGIONS_PER_SEGMENT

    def total_segments(self):
        return self.device.map_slots // REGIONS_PER_SEGMENT

    def _dram_step(self):
        policy = self.policy
        mapping = self.device.mapping
        borrowing = self.borrowed(ResourceType.DRAM)
        current = self.local_segments() + len(mapping.segments)
        decision = decide_dram_action(
            mapping.mrc, current, self.total_segments(), threshold=policy.miss_threshold,
            epsilon=policy.slope_cutoff, borrow_cap=policy.max_borrow_segments, warm_samples=policy.warm_samples,
        )
        offers = self.offers_of(ResourceType.DRAM)
        if decision.action == Action.LEND:
            if borrowing:
                self.release(borrowing[-1], 'borrowed DRAM no longer helps')
            elif not offers and not self.lent(ResourceType.DRAM):
                self.publish_dram(decision.segments)
        elif decision.action == Action.BORROW:
            for offer in offers:
                self.withdraw(offer)
            if not offers and not self.lent(ResourceType.DRAM) and len(borrowing) < policy.borrow_cap:
                self.claim(ResourceType.DRAM)

    def publish_dram(self, segments):
        """
        Shrink the local mapping cache by ``segments`` and offer the space.
        """
        segments = min(segments, self.local_segments() - 1)
        if segments <= 0:
            return None
        region = self.fabric.register_region(self.device.id, segments * SEGMENT_SIZE, RegionKind.LENDABLE_SEGMENT)
        descriptor = IdleResourceDescriptor.dram(
            capacity_mb=segments * SEGMENT_MB, segment_list_address=self.table.encode_address(region.base),
        )
        lent = segments * REGIONS_PER_SEGMENT
        offer = Offer(ResourceType.DRAM, slot=None, region=region, regions_lent=lent)
        slot = self._publish(offer, descriptor)
        if slot is None:
            return None
        mapping = self.device.mapping
        self.device.apply_effects(mapping.set_capacity(mapping.capacity - lent))
        self.registry.record(HarvestEvent.SEGMENTS_MOVED, lender=self.device.id, segments=segments, direction='offered')
        logger.info('[harvest] %s offers %s DRAM segments (%s MB)', self.device.id, segments, segments * SEGMENT_MB)
        return slot

    def as_dict(self):
        mapping = self.device.mapping
        return {
            'device': self.device.id,
            'offers': len(self.offers),
            'local_segments': self.local_segments(),
            'borrowed_segments': len(mapping.segments),
            'offsite_regions': mapping.offsite_regions(),
            'offsite_mb': ceil(mapping.offsite_regions() * MAP_PAGE_SIZE / MB),
        }

