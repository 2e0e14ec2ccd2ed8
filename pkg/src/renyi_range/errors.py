"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EntropyRangeError(ValueError):
    """An entropy value lies outside the attainable range for the query."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class ConsistencyError(ArithmeticError):
    """Two computations that must agree did not; indicates a numerics bug."""
