"""
Exception hierarchy shared by the simulator.
Each class carries the process exit status the CLI maps it to.
"""


class SimulationError(Exception):
    """Base class for all simulator failures."""
    code = "SIMULATION_ERROR"
    exit_code = 4


class ConfigurationError(SimulationError, ValueError):
    """Raised when a device or run is configured with invalid parameters."""
    code = "CONFIG_ERROR"
    exit_code = 2


class UnphysicalStateError(SimulationError, ValueError):
    """Raised for a Bloch vector longer than one."""
    code = "UNPHYSICAL_STATE"
    exit_code = 2


class EmptyTableError(SimulationError):
    """Raised when frequencies are requested from a table with no detections."""
    code = "EMPTY_TABLE"
    exit_code = 4


class InvariantViolation(SimulationError):
    """Raised when a runtime invariant (conservation, DLM range) breaks."""
    code = "INVARIANT_VIOLATION"
    exit_code = 4


class OutputError(SimulationError):
    """Raised when results cannot be written or lab data cannot be read."""
    code = "IO_ERROR"
    exit_code = 3
