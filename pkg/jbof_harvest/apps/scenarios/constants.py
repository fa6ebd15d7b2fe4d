"""
Constants for the scenarios app.
"""
from jbof_harvest.apps.core.constants import MB, MS

# Firmware slows down on the host's general-purpose cores (open-channel drives).
OC_FIRMWARE_SCALE = 1.5

# Fewest mapping-cache regions a device is left with.
MIN_MAPPING_REGIONS = 1

SHRUNK_DRAM_FLOOR = 2 * MB

REPORT_FILE = 'report.json'
SUMMARY_FILE = 'summary.csv'
TRACE_FILE = 'events.log'
PRESET_SUFFIX = '.yaml'

# Runs bounded by their trace keep going this long after its last record.
TRACE_DRAIN_NS = 20 * MS

DEFAULT_SSD_COUNT = 12
DEFAULT_DURATION_MS = 100.0

FAILURE_ACTOR = 'scenario.failures'


class RunStatus:
    PENDING = 'pending'
    RUNNING = 'running'
    SUCCEEDED = 'succeeded'
    FAILED = 'failed'
    CHOICES = (
        (PENDING, 'Pending'),
        (RUNNING, 'Running'),
        (SUCCEEDED, 'Succeeded'),
        (FAILED, 'Failed'),
    )


class WorkloadMode:
    """
    How the commands of a workload entry are produced.
    """
    MICROBENCH = 'microbench'
    PROFILE = 'profile'
    TRACE = 'trace'
    ALL = (MICROBENCH, PROFILE, TRACE)


class FailureKind:
    """
    The role the failing SSD plays. A failing borrower must be running a workload.
    """
    LENDER = 'lender-fail'
    BORROWER = 'borrower-fail'
    ALL = (LENDER, BORROWER)
