"""
Constants for the host app.
"""


class QueueRole:
    NORMAL = 'normal'
    SHADOW = 'shadow'


class GroupState:
    """
    Life cycle of a virtual harvesting group.
    """
    ACTIVE = 'active'
    RECLAIMING = 'reclaiming'
    RELEASED = 'released'


# Queue ids: normal queues start at 1, shadow queues follow at this base.
SHADOW_QID_BASE = 0x100

# Host-side command cost, split evenly between submission and completion.
COMMAND_CYCLES = 2_100

# Consecutive windows above the watermark that make a device bursty (virtual harvesting).
BURST_WINDOWS = 2
