"""
Exceptions for the harvest app.
"""
from jbof_harvest.apps.core.exceptions import SimulationError


class HarvestError(SimulationError):
    """
    Base exception class around the harvesting protocol.
    """


class DescriptorFieldError(HarvestError, ValueError):
    """
    Raised when a descriptor field does not fit its width.
    """


class LogClosedError(HarvestError):
    """
    Raised when a record is appended to the log of a closed session.
    """
