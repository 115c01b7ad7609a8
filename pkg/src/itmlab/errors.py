"""Shared exception types."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NoRootInInterval(ValueError):
    """Root isolation found no root in the requested interval."""


class MultipleRootsInInterval(ValueError):
    """Root isolation found more than one root in the requested interval."""


class PrecisionExhausted(RuntimeError):
    """A comparison fell inside the guard band at the maximal working precision.

    ``step`` records how far the computation got before the ambiguity.
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class InvariantViolation(AssertionError):
    """A certified invariant failed; carries the offending data for the report."""

    def __init__(self, message: str, step: int | None = None, data=None):
        super().__init__(message)
        self.step = step
        self.data = data


class ParseError(ValueError):
    """Malformed textual input (k-sequence grammar, parameter literals, words)."""
