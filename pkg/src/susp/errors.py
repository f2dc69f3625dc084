"""Exception types. Each carries a stable ``code`` used in CLI messages."""


class SuspError(Exception):
    code = "ERROR"

    def __str__(self):
        msg = super().__str__()
        return f"{self.code}: {msg}" if msg else self.code


class PuzzleFormatError(SuspError, ValueError):
    def __init__(self, code, message=""):
        super().__init__(message)
        self.code = code


class WidthMismatchError(SuspError, ValueError):
    code = "WIDTH_MISMATCH"


class SizeLimitError(SuspError, ValueError):
    code = "SIZE_LIMIT"


class BadSubsetSizeError(SuspError, ValueError):
    code = "BAD_SUBSET_SIZE"


class SolverError(SuspError, RuntimeError):
    code = "SOLVER_ERROR"


class SolverTimeout(SolverError):
    code = "SOLVER_TIMEOUT"


class SolverCrash(SolverError):
    code = "SOLVER_CRASH"


class Cancelled(SuspError):
    """Raised inside a solver when its cancel event fires."""

    code = "CANCELLED"


class CheckpointError(SuspError, OSError):
    code = "CHECKPOINT_IO"


class VersionMismatchError(CheckpointError):
    code = "VERSION_MISMATCH"


class TimeLimitError(SuspError):
    code = "TIME_LIMIT"


class InsufficientWitnessesError(SuspError, ValueError):
    code = "INSUFFICIENT_WITNESSES"
