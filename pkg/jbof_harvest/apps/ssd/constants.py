"""
Constants for the ssd app.
"""
from jbof_harvest.apps.core.constants import MB

# One mapping page is a 16 KB flash page of 4-byte entries.
MAP_ENTRY_SIZE = 4
ENTRIES_PER_MAP_PAGE = 4096
MAP_PAGE_SIZE = MAP_ENTRY_SIZE * ENTRIES_PER_MAP_PAGE

# DRAM is lent in segments of mapping pages.
SEGMENT_SIZE = 2 * MB
REGIONS_PER_SEGMENT = SEGMENT_SIZE // MAP_PAGE_SIZE

# Mapping value of a logical page that was never written.
UNMAPPED = 0xFFFFFFFF

# Dequeue-and-unwrap cost of one operation in a data-end agent queue.
AGENT_UNWRAP_PS = 114_200

# Size of one wrapped DMA or flash operation message.
AGENT_MESSAGE_SIZE = 64

WINDOW_NS = 10_000_000


class Opcode:
    READ = 'read'
    WRITE = 'write'
    ALL = (READ, WRITE)


class CommandStatus:
    PENDING = 'pending'
    SUCCESS = 'success'
    ERROR = 'error'


class Locator:
    """
    Where a mapping region currently lives.
    """
    LOCAL = 'local'
    OFFSITE = 'offsite'
    FLASH = 'flash'


class TranslateOutcome:
    HIT = 'hit'
    LOCAL_MISS = 'local-miss'
    OFFSITE_HIT = 'offsite-hit'


class BusyTag:
    """
    Tags for core time that is not plain local command processing.
    """
    REMOTE = 'remote'
    BACKGROUND = 'background'
    DAEMON = 'daemon'
