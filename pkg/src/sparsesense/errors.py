"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes (see cli.py): validation-type errors
exit with 2, convergence/training failures with 3, I/O problems with 4.
"""


class SparseSenseError(Exception):
    """Base class for all library errors."""


class ValidationError(SparseSenseError):
    """Input violates a contract (non-finite entries, shape mismatch, bad config)."""


class BoundsError(ValidationError):
    """A rank / index argument is outside its admissible range."""


class ConstraintError(ValidationError):
    """A structural constraint is violated (e.g. sensor count below mode count)."""


class DegenerateInputError(ValidationError):
    """Input is degenerate for the requested operation (e.g. all-zero matrix)."""


class TrainingDivergenceError(SparseSenseError):
    """Training loss became non-finite. Carries the offending epoch index."""

    def __init__(self, epoch: int, message: str | None = None):
        self.epoch = epoch
        super().__init__(message or f"training diverged at epoch {epoch}")
