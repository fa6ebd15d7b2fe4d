"""
Exceptions for the fabric app.
"""
from jbof_harvest.apps.core.exceptions import SimulationError


class FabricError(SimulationError):
    """
    Base exception class around the CXL fabric.
    """


class FabricFault(FabricError):
    """
    Raised on an access to an unregistered or misaligned global address.
    """


class LockError(FabricError):
    """
    Raised when a lock is released by a holder that does not hold it.
    """
