"""Exception hierarchy.

:class:`ConfigError` maps to CLI exit code 2 and :class:`NumericalError`
(and subclasses) to exit code 3.
"""


class HiddenDriverError(Exception):
    """Base class for package errors."""


class ConfigError(HiddenDriverError, ValueError):
    """Invalid or unknown configuration."""


class NumericalError(HiddenDriverError, ArithmeticError):
    """A numerical procedure could not produce a valid result."""


class DivergenceError(NumericalError):
    """Simulation left its bounded domain on every restart."""


class SeriesTooShortError(HiddenDriverError, ValueError):
    """Series has too few samples for the requested operation."""


class AlignmentError(HiddenDriverError, ValueError):
    """Two embedded series do not share shape or time indices."""


class DegenerateSeriesError(NumericalError):
    """Zero-variance input where a spread is required."""


class InsufficientEstimatesError(NumericalError):
    """Too few valid local dimension estimates for a global median."""


class UnsupportedShapeError(HiddenDriverError, ValueError):
    """Derived SOM shape is not the supported 1+1 layout."""


class GridFormatError(HiddenDriverError, ValueError):
    """Grid file is malformed or has an unsupported version."""


class NonFiniteCentersError(NumericalError):
    """SOM training produced a non-finite receptive-field center."""


class PipelineError(HiddenDriverError):
    """Failure inside a workflow step; ``step`` names where it happened."""

    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"step {step} failed: {cause}")
