"""Exception types shared across the solver."""


class BaromoistError(Exception):
    """Base class for all solver errors."""


class ConstraintViolation(BaromoistError):
    """A model parameter violates its admissibility constraint."""


class GridMismatch(BaromoistError):
    """Fields from different grids were combined."""


class EpsilonZero(BaromoistError):
    """An operation requiring a positive relaxation time was called with epsilon = 0."""


class BlowUp(BaromoistError):
    """Non-finite values appeared in the solution.

    Carries the name of the offending term and, when available, the last
    finite state (attached by the run loop before re-raising).
    """

    def __init__(self, term: str, time: float | None = None):
        self.term = term
        self.time = time
        msg = f"non-finite values in {term}"
        if time is not None:
            msg += f" at t={time:g}"
        super().__init__(msg)


class StepTooSmall(BaromoistError):
    """The CFL cap pushed the time step below the configured minimum."""


class CheckpointError(BaromoistError):
    """A checkpoint file is malformed, truncated, or corrupted."""


class UnsupportedVersion(CheckpointError):
    """A checkpoint file carries an unknown format version."""


class ConfigError(BaromoistError):
    """An experiment configuration file or value is invalid."""
