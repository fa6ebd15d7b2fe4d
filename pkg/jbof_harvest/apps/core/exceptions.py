"""
Base exceptions for the simulator.
"""


class SimulationError(Exception):
    """
    Base exception class for every simulator error.
    """


class InvariantViolation(SimulationError):
    """
    Raised when a checked invariant of the simulated system does not hold,
    e.g. a read returns data that disagrees with the integrity oracle.
    """
