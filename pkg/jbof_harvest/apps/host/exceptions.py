"""
Exceptions for the host app.
"""
from jbof_harvest.apps.core.exceptions import SimulationError


class HostError(SimulationError):
    """
    Base exception class around the JBOF host.
    """


class QueueBindingError(HostError):
    """
    Raised when a shadow queue is bound twice or an unknown queue is addressed.
    """


class DeviceFailedError(HostError):
    """
    Raised when a command is addressed to a device the host declared failed.
    """
