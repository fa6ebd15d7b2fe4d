"""
Exceptions for the metrics app.
"""
from jbof_harvest.apps.core.exceptions import SimulationError


class MetricsError(SimulationError):
    """
    Base exception class around measurement, cost and energy accounting.
    """


class CostModelError(MetricsError, ValueError):
    """
    Raised for a cost query outside the model (unknown variant, no capacity).
    """
