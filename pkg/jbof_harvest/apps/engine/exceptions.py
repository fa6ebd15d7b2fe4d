"""
Exceptions for the engine app.
"""
from jbof_harvest.apps.core.exceptions import SimulationError


class EngineError(SimulationError):
    """
    Base exception class for the discrete-event kernel.
    """


class SchedulingError(EngineError, ValueError):
    """
    Raised when an event is scheduled in the past or for an unknown actor.
    """
