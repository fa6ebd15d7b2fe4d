"""
Constants for the metrics app.
"""
from jbof_harvest.apps.core.constants import Variant

# Latency buckets of one command, in accounting order.
LATENCY_BUCKETS = ('host', 'host_ssd', 'processor', 'dram', 'flash', 'inter_ssd')

PERCENTILES = (50, 99)

# Throughput and utilization series resolution.
SERIES_WINDOW_NS = 10_000_000

# Sub-buckets per power of two once latency samples overflow the exact cap.
HISTOGRAM_STEPS_PER_OCTAVE = 16


class CostFactor:
    """
    Multipliers applied to the controller and DRAM price of each variant.
    """
    SHRINK = 0.5
    CXL_UPLIFT = 1.10
    FACTORS = {
        Variant.CONV: 1.0,
        Variant.SHRUNK: SHRINK,
        Variant.VH: SHRINK,
        Variant.VH_IDEAL: SHRINK,
        Variant.PROCH: SHRINK * CXL_UPLIFT,
        Variant.XBOF: SHRINK * CXL_UPLIFT,
    }


class EnergyComponent:
    FLASH_OPS = 'flash_ops'
    FLASH_IDLE = 'flash_idle'
    PHY = 'phy'
    PROCESSOR = 'processor'
    DRAM = 'dram'
    ALL = (FLASH_OPS, FLASH_IDLE, PHY, PROCESSOR, DRAM)
