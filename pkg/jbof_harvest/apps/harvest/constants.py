"""
Constants for the harvest app.
"""

# Idle resource descriptor tables
DESCRIPTOR_SLOTS = 8
DESCRIPTOR_SIZE = 16
UNCLAIMED = 0xFF
BASIS_POINTS = 10_000

# Redo log pages
LOG_PAGE_SIZE = 4096
LOG_HEADER_SIZE = 32
LOG_RECORD_SIZE = 16
LOG_RECORDS_PER_PAGE = (LOG_PAGE_SIZE - LOG_HEADER_SIZE) // LOG_RECORD_SIZE
LOG_MAGIC = b'RDLG'
# Committing one record with its write-back guarantee.
REDO_COMMIT_PS = 321_900

# Trigger policy defaults
PROCESSOR_WATERMARK = 0.75
RELEASE_WATERMARK = 0.5
MISS_RATIO_THRESHOLD = 0.10
# Per-segment miss-ratio gain below which more DRAM is considered no help.
MRC_SLOPE_CUTOFF = 0.005
MRC_WARM_SAMPLES = 1_000
BORROW_CAP = 4
MAX_BORROW_SEGMENTS = 64
REDIRECT_SMOOTHING = 0.5
# Descriptors not refreshed for this many windows are ignored by the host.
STALE_WINDOWS = 2
# Core cycles the harvesting daemon spends per monitoring window.
DAEMON_CYCLES = 5_000


class ResourceType:
    PROCESSOR = 0
    DRAM = 1
    CHOICES = (
        (PROCESSOR, 'processor'),
        (DRAM, 'dram'),
    )


class Action:
    """
    Outcome of a trigger decision.
    """
    NONE = 'none'
    LEND = 'lend'
    BORROW = 'borrow'


class SessionState:
    ACTIVE = 'active'
    DRAINING = 'draining'
    CLOSED = 'closed'


class HarvestEvent:
    """
    Kinds of entries in the harvest timeline.
    """
    PUBLISHED = 'published'
    WITHDRAWN = 'withdrawn'
    OPENED = 'opened'
    CLOSED = 'closed'
    SEGMENTS_MOVED = 'segments-moved'
    REDIRECT = 'redirect'
    FAILURE = 'failure'
    RECOVERED = 'recovered'
