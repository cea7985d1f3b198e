"""Exception types raised across the package."""


class TQCError(ValueError):
    """Base class for input and precondition errors."""


class CurveError(TQCError):
    """Invalid or degenerate curve data."""


class MapError(TQCError):
    """Invalid boundary map or circle homeomorphism."""


class ScanError(TQCError):
    """A scan found nothing admissible to measure."""


class ValidationFailure(RuntimeError):
    """A numerical self-check failed (e.g. the Koebe sandwich on a fitted map).

    ``report`` carries the diagnostics that triggered the failure.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class InputError(TQCError):
    """Malformed input file; the message names the offending field."""
