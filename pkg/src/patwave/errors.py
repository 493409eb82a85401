"""Exception types raised by the numerical kernels, I/O layer, and CLI."""


class PatwaveError(Exception):
    """Base class for package-specific failures."""


class ConfigError(PatwaveError):
    """Invalid configuration, mismatched grids, or malformed input files."""


class CflError(PatwaveError):
    """Requested time step violates the CFL stability bound."""


class BlowUpError(PatwaveError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, step_index: int, message: str | None = None):
        self.step_index = step_index
        super().__init__(message or f"solution blew up at step {step_index}")


class EigenSolverError(PatwaveError):
    """The generalized eigensolver failed or the mode count is out of range."""


class OptimizerAbort(PatwaveError):
    """The SQH iteration hit its epsilon guard (stationarity or solver inconsistency)."""
