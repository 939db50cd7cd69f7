"""Exception types shared across modules (the CLI maps each to an exit code)."""


class CharSumError(Exception):
    pass


class PreconditionError(CharSumError, ValueError):
    """Arguments violate an operation's precondition."""


class MemoryCapError(CharSumError, MemoryError):
    """Requested table would exceed the configured memory cap."""


class QuadratureError(CharSumError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class WeilViolation(CharSumError, AssertionError):
    """A complete character sum exceeded the Weil bound (an implementation bug)."""
