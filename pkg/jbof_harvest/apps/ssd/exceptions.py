"""
Exceptions for the ssd app.
"""
from jbof_harvest.apps.core.exceptions import SimulationError


class SsdError(SimulationError):
    """
    Base exception class around a simulated SSD.
    """


class DeviceFullError(SsdError):
    """
    Raised when garbage collection cannot find an erasable block.
    """


class SampleWindowError(SsdError):
    """
    Raised when utilization is sampled before a full window has elapsed.
    """


class OffsiteSessionError(SsdError):
    """
    Raised on offsite mapping activity for a segment whose session is closed.
    """
