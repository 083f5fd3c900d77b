"""Exception types shared across the package."""


class CardinalMRAError(Exception):
    """Base class for errors raised by this package."""


class DomainError(CardinalMRAError, ValueError):
    """Argument outside the domain an operation supports."""


class ConvergenceError(CardinalMRAError, ArithmeticError):
    """An iterative evaluation did not reach its tolerance within budget."""


class ToleranceUnreachable(ConvergenceError):
    """The requested tolerance would need more terms than the hard caps allow."""
