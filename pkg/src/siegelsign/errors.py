"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a mathematical precondition of an operation."""


class PrecisionError(DomainError):
    """A coefficient was requested outside the stored truncation range."""


class UndecidedError(DomainError):
    """The stored truncation is too short to decide the requested question."""
