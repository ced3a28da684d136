class GuardExceeded(RuntimeError):
    """An exponential enumeration would exceed its configured size limit."""


class InvariantViolation(AssertionError):
    """A proven property of the local search failed at runtime."""

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump


class IterationCapExceeded(RuntimeError):
    """The local search ran past its iteration cap (termination is proven, so this is a bug)."""


class NotStuckError(ValueError):
    """A witness was requested for a state that still has a move available."""
