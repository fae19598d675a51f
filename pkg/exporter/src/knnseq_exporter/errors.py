"""Shared exception type."""


class ExporterError(ValueError):
    """Raised when inputs fail validation (CLI exit code 1)."""
