"""
Core utility functions.
"""
import hashlib

from jbof_harvest.apps.core.constants import PS_PER_NS, SEC


def stable_hash(*args):
    """
    Utility to produce a 64-bit hash of the given arguments that is stable
    across processes and interpreter runs (unlike the builtin ``hash``).
    """
    key = ':'.join(str(arg) for arg in args)
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], 'little')


def ceil_div(numerator, denominator):
    """Integer division rounding toward positive infinity."""
    return -(-numerator // denominator)


def transfer_ns(nbytes, bytes_per_second):
    """
    Whole nanoseconds needed to move ``nbytes`` at ``bytes_per_second``, rounded up.
    """
    return ceil_div(nbytes * SEC, int(bytes_per_second))


def cycles_to_ps(cycles, frequency_hz):
    """
    Picoseconds taken by ``cycles`` at ``frequency_hz``, rounded up.
    """
    return ceil_div(int(cycles) * SEC * PS_PER_NS, int(frequency_hz))


def ps_to_ns_ceil(picoseconds):
    return ceil_div(picoseconds, PS_PER_NS)


def fraction(numerator, denominator):
    """
    Busy fraction clamped to [0, 1]; an empty denominator reads as idle.
    """
    if denominator <= 0:
        return 0.0
    return min(1.0, max(0.0, numerator / denominator))
