"""
Recovery of harvest sessions after the host declares an SSD failed.
"""
import logging

import attr

from .constants import UNCLAIMED, HarvestEvent, ResourceType

logger = logging.getLogger(__name__)


@attr.s(frozen=True)
class RecoveryResult:
    sessions = attr.ib(type=int, default=0)
    replayed = attr.ib(type=int, default=0)


def recover_lender_failure(agent, lender_id):
    """
    Rebuild what ``agent``'s SSD had borrowed from the dead ``lender_id``.

    Offsite mapping entries are replayed from the redo logs the borrower keeps
    over its own flushed mapping pages. The host resubmits the shadow-queue
    commands itself; here the shadow binding is dropped.
    """
    registry = agent.registry
    sessions = registry.active(lender=lender_id, borrower=agent.device.id)
    replayed = 0
    for session in sessions:
        if session.kind == ResourceType.DRAM:
            effects, count = agent.device.mapping.recover(lender_id)
            agent.device.apply_effects(effects)
            replayed += count
        else:
            agent.host.unbind_shadow(lender_id, session.shadow_cqid)
        registry.close(session, f'lender {lender_id} failed')
    if sessions:
        registry.record(
            HarvestEvent.RECOVERED, device=agent.device.id, failed=lender_id, role='borrower', replayed=replayed,
        )
        logger.info('[harvest] %s recovered %s sessions lost with lender %s', agent.device.id, len(sessions), lender_id)
    return RecoveryResult(len(sessions), replayed)


def recover_borrower_failure(agent, borrower_id):
    """
    Take back what ``agent``'s SSD had lent to the dead ``borrower_id``: clear the
    lent segments and make the offers claimable again. Safe to repeat.
    """
    registry = agent.registry
    sessions = registry.active(lender=agent.device.id, borrower=borrower_id)
    for session in sessions:
        offer = agent.offers.get(session.slot)
        if session.kind == ResourceType.PROCESSOR:
            agent.host.unbind_shadow(agent.device.id, session.shadow_cqid)
        elif offer is not None and offer.region is not None:
            agent.fabric.clear(offer.region)
        if offer is not None and offer.withdrawn:
            agent.table.write(session.slot, agent.table.read(session.slot).evolve(borrower_id=UNCLAIMED))
            agent._retire(offer)
        else:
            agent.table.reset(session.slot)
        registry.close(session, f'borrower {borrower_id} failed')
    if sessions:
        registry.record(HarvestEvent.RECOVERED, device=agent.device.id, failed=borrower_id, role='lender')
        logger.info('[harvest] %s reclaimed %s sessions of failed borrower %s', agent.device.id, len(sessions),
                    borrower_id)
    return RecoveryResult(len(sessions))
