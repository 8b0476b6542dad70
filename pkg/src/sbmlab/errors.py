"""Exception and warning types shared across the package."""


class SbmLabError(Exception):
    """Base class for numerical and I/O failures raised by this package."""


# --- profile solvers ---

class BracketFailure(SbmLabError):
    """The shooting classifier found no sign change in the initial bracket."""


class StiffnessFailure(SbmLabError):
    """The adaptive integrator's step control underflowed or the IVP failed."""


class StabilityViolation(SbmLabError):
    """A PDE state left the admissible range (negative beyond tolerance or NaN)."""


class CrossCheckMismatch(SbmLabError):
    """Two independent solution routes disagree beyond the declared tolerance."""


# --- spectral ---

class QuadratureUnderflow(SbmLabError):
    """The killing function's grid is too narrow to cover the quadrature core."""


class OutOfRange(SbmLabError):
    """An input lies outside its admissible interval."""


class TruncationWarning(UserWarning):
    """Non-fatal: the leading eigenvalue moved when the truncation box grew."""


# --- simulation ---

class MassExplosion(SbmLabError):
    """Total simulated mass exceeded the instability guard."""


class RejectionBudgetExceeded(SbmLabError):
    """Conditioned-cluster rejection sampling would need more attempts than allowed."""


class InsufficientSurvivors(SbmLabError):
    """Too few replicates carry enough mass for the requested statistic."""


# --- fitting ---

class DegenerateFit(SbmLabError):
    """Not enough usable ladder points to fit a power law."""


# --- result store ---

class IoError(SbmLabError):
    """Filesystem failure while writing or reading a run directory."""


class CollisionError(SbmLabError):
    """A run directory with the same id exists but with different content."""


class CorruptManifest(SbmLabError):
    """A stored manifest or artifact failed validation.

    ``offset`` is the byte position where parsing or verification failed,
    when known.
    """

    def __init__(self, message, offset=None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


# --- figures / store consumers ---

class MissingRun(SbmLabError):
    """A referenced run id does not exist in the store."""


class SchemaMismatch(SbmLabError):
    """A stored CSV file does not follow the store dialect."""
