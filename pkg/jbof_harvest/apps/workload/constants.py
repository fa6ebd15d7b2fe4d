"""
Constants for the workload app.
"""
from jbof_harvest.apps.core.constants import KB, LPN_SIZE

TRACE_HEADER = ('timestamp_us', 'device_id', 'op', 'offset', 'size')

# Sizes are drawn in whole logical pages.
SIZE_QUANTUM = LPN_SIZE
MIN_REQUEST_SIZE = 4 * KB

DEFAULT_ZIPF_THETA = 0.99
# Distinct hot spots a Zipf pattern ranks; each covers an equal slice of the footprint.
ZIPF_RANKS = 1 << 16

DEFAULT_IODEPTH = 64

# Reported source of profile-driven streams: built from mean statistics, so the
# burstiness of the traces behind a profile is not reproduced.
PROFILE_SOURCE = 'profile-derived'


class TraceOp:
    """
    Operation codes used in trace files.
    """
    READ = 'R'
    WRITE = 'W'
    ALL = (READ, WRITE)


class AccessPattern:
    SEQUENTIAL = 'sequential'
    UNIFORM = 'uniform'
    ZIPF = 'zipf'
    ALL = (SEQUENTIAL, UNIFORM, ZIPF)


class MicrobenchKind:
    SEQUENTIAL = 'seq'
    RANDOM = 'rand'
    ALL = (SEQUENTIAL, RANDOM)
