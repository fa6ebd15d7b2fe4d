"""
Exceptions for the scenarios app.
"""
from jbof_harvest.apps.core.exceptions import SimulationError


class ScenarioError(SimulationError):
    """
    Base exception class for scenario configuration and runs.
    """


class ScenarioConfigError(ScenarioError, ValueError):
    """
    Raised when a scenario document does not validate. ``errors`` maps dotted
    field paths to messages.
    """

    def __init__(self, errors):
        self.errors = errors
        super().__init__('; '.join(f'{path}: {message}' for path, message in sorted(errors.items())))
