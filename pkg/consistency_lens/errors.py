"""Exception types raised by consistency-lens."""
from __future__ import annotations


class ConsistencyError(Exception):
    """Base class for every error raised by the package."""


class PreconditionError(ConsistencyError, ValueError):
    """An operation was called outside its domain."""


class ConfigurationError(ConsistencyError, LookupError):
    """A name (predicate, spec, semantics) could not be resolved."""


class BudgetExceeded(ConsistencyError, RuntimeError):
    """A search stopped before it could certify a verdict."""

    def __init__(self, bound: str, limit: int, explored: int) -> None:
        self.bound = bound
        self.limit = limit
        self.explored = explored
        super().__init__(f"search budget exceeded: {bound} limit {limit} (explored {explored} nodes)")

    def __reduce__(self):
        return type(self), (self.bound, self.limit, self.explored)


class TraceSyntaxError(ConsistencyError, ValueError):
    def __init__(self, line: int, column: int, message: str) -> None:
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{line}:{column}: {message}")

    def __reduce__(self):
        return type(self), (self.line, self.column, self.message)
