"""
Exceptions for the workload app.
"""
from jbof_harvest.apps.core.exceptions import SimulationError


class WorkloadError(SimulationError):
    """
    Base exception class around workload generation and trace replay.
    """


class TraceFormatError(WorkloadError, ValueError):
    """
    Raised when a trace file cannot be read at all, e.g. its header is wrong.
    """

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f'line {line_number}: {message}'
        super().__init__(message)


class UnknownProfileError(WorkloadError, KeyError):
    """
    Raised for a profile name that is not defined.
    """
