"""Exception hierarchy for the toolkit.

Every error raised by ferrocal derives from :class:`FerrocalError`, so callers
(and the CLI) can map failure classes to exit codes without matching on
message text.
"""


class FerrocalError(Exception):
    """Base class for all toolkit errors."""


class DomainError(FerrocalError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(FerrocalError, ValueError):
    """A configuration value or object violates its invariants."""


class RankError(FerrocalError):
    """Input data are degenerate (flat / constant) and cannot constrain a fit."""


class FitError(FerrocalError):
    """The optimizer failed to converge.

    Carries the best parameters reached so far in ``best_fit`` (may be None).
    """

    def __init__(self, message, best_fit=None):
        super().__init__(message)
        self.best_fit = best_fit


class MarkerAbsentError(FerrocalError):
    """The requested curve marker (e.g. a zero crossing) does not exist."""


class AmbiguousMarkerError(FerrocalError):
    """The curve crosses the marker level more than once."""


class RangeError(FerrocalError):
    """A computed voltage falls outside the programmable DAC range."""


class ParseError(FerrocalError):
    """An input file is malformed. ``line`` is the 1-based offending line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
