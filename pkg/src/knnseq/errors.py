"""Shared exception types."""


class ValidationError(ValueError):
    """Raised when an input file, record, or parameter fails validation.

    The CLI maps this to exit code 1; any other exception maps to exit code 2.
    """
