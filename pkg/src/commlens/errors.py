"""Exception types shared across the package.

The CLI maps these onto stable exit codes: I/O errors -> 1,
parse/validation errors -> 2, undefined math -> 3.
"""


class CommlensError(Exception):
    """Base class for all package-specific errors."""


class ParseError(CommlensError, ValueError):
    """Malformed edge-list input."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ValidationError(CommlensError, ValueError):
    """Arguments violate an operation's preconditions."""


class SizeLimitError(ValidationError):
    """Input exceeds a hard size guard (e.g. the brute-force node cap)."""


class UndefinedModularityError(CommlensError, ArithmeticError):
    """Modularity requested for a graph with zero total edge weight."""
