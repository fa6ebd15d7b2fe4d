"""
Exceptions for the flash app.
"""
from jbof_harvest.apps.core.exceptions import SimulationError


class FlashError(SimulationError):
    """
    Base exception class around the flash backbone.
    """


class FlashAddressError(FlashError):
    """
    Raised when an operation targets an address outside the geometry.
    """


class ProgramError(FlashError):
    """
    Raised when a page is programmed without being erased first.
    """


class UtilizationWindowError(FlashError):
    """
    Raised when a utilization window is empty or not yet in the past.
    """
