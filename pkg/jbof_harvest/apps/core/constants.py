"""
Constants shared by every simulator app.

All simulated time is integer nanoseconds. Station accounting uses integer
picoseconds so fractional-nanosecond service times stay exact.
"""

# Time units, in nanoseconds
NS = 1
US = 1_000
MS = 1_000_000
SEC = 1_000_000_000

PS_PER_NS = 1_000

# Sizes, in bytes
KB = 1024
MB = 1024 * KB
GB = 1024 * MB
TB = 1024 * GB

# Logical page (mapping unit) size
LPN_SIZE = 4 * KB

# Identifier of the host on the fabric and in event targets.
HOST_ID = 'host'


class Variant:
    """
    Enumerate the platform variants a scenario can run.
    """
    CONV = 'conv'
    SHRUNK = 'shrunk'
    OC = 'oc'
    VH = 'vh'
    VH_IDEAL = 'vh-ideal'
    PROCH = 'proch'
    XBOF = 'xbof'
    CHOICES = (
        (CONV, 'Conventional JBOF'),
        (SHRUNK, 'Shrunk SSD resources, no sharing'),
        (OC, 'Open-channel SSDs, firmware on the host'),
        (VH, 'Virtual harvesting with write copyback'),
        (VH_IDEAL, 'Virtual harvesting without copyback'),
        (PROCH, 'Processor harvesting only'),
        (XBOF, 'Processor and DRAM harvesting'),
    )
    ALL = tuple(choice for choice, _ in CHOICES)
    # Variants whose SSDs carry halved compute-end resources.
    SHRUNK_RESOURCES = (SHRUNK, VH, VH_IDEAL, PROCH, XBOF)
    PROCESSOR_HARVESTING = (PROCH, XBOF)
    DRAM_HARVESTING = (XBOF,)
    VIRTUAL_HARVESTING = (VH, VH_IDEAL)
