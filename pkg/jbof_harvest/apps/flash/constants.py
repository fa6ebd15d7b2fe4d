"""
Constants for the flash app.
"""


class PageType:
    """
    TLC page types; a page's type is its index within the block modulo 3.
    """
    LSB = 0
    CSB = 1
    MSB = 2
    CHOICES = (
        (LSB, 'LSB'),
        (CSB, 'CSB'),
        (MSB, 'MSB'),
    )


class FlashOpKind:
    READ = 'read'
    PROGRAM = 'program'
    ERASE = 'erase'
    ALL = (READ, PROGRAM, ERASE)


class TimingUnit:
    """
    How the MSB row of the timing table is read: microseconds like the other rows
    (default) or literally as milliseconds.
    """
    MICROSECONDS = 'us'
    MILLISECONDS = 'ms'
    ALL = (MICROSECONDS, MILLISECONDS)


# Busy-interval history kept per die, so utilization windows can be measured after the fact.
DEFAULT_DIE_HISTORY_NS = 20_000_000
