"""Error types shared across the package."""


class PreconditionError(ValueError):
    """A mathematical precondition on caller-supplied data failed."""


class TruncationError(PreconditionError):
    """Truncation orders are too shallow to perform or certify an operation."""
