"""
Constants for the fabric app.
"""

# Coherent word size; CAS targets must be aligned to it.
WORD_SIZE = 8

# Allocation granularity of fabric-attached memory regions.
REGION_ALIGNMENT = 4096


class RegionKind:
    """
    What a region of global fabric-attached memory holds.
    """
    DESCRIPTOR_TABLE = 'descriptor-table'
    MESSAGE_QUEUE = 'message-queue'
    LENDABLE_SEGMENT = 'lendable-segment'
    LOG_PAGE = 'log-page'
    MAPPING_TABLE = 'mapping-table'
    CHOICES = (
        (DESCRIPTOR_TABLE, 'Idle resource descriptor table'),
        (MESSAGE_QUEUE, 'Data-end agent message queue'),
        (LENDABLE_SEGMENT, 'Lendable DRAM segments'),
        (LOG_PAGE, 'Redo log pages'),
        (MAPPING_TABLE, 'Mapping table cache'),
    )
    ALL = tuple(choice for choice, _ in CHOICES)


class LockMode:
    READ = 'read'
    WRITE = 'write'
    ALL = (READ, WRITE)
