"""
Error hierarchy for Bell Decoherence.

Every error carries the exit code the CLI returns when it is not handled
further down.
"""


class BellDecoherenceError(Exception):
    """Base class for all package errors."""
    exit_code = 4


class ConfigError(BellDecoherenceError, ValueError):
    """Scenario file could not be parsed or validated."""
    exit_code = 2

    def __init__(self, message: str, key: str = ""):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class InvalidLabelError(BellDecoherenceError, ValueError):
    """Unknown Bell state, geometry or tensor label."""
    exit_code = 2


class MethodGeometryError(BellDecoherenceError):
    """Requested method cannot handle the scenario's geometry or noise."""
    exit_code = 3


class NumericalError(BellDecoherenceError):
    """Non-finite output, failed bracketing or a broken numerical invariant."""
    exit_code = 4


class NotADensityMatrixError(NumericalError, ValueError):
    """Operator is not Hermitian, not unit trace or not positive semidefinite."""


class NotXCorrError(NumericalError, ValueError):
    """State lies outside the X_corr class."""


class UnsupportedNoiseError(BellDecoherenceError, ValueError):
    """Operation is not defined for this kind of noise."""
    exit_code = 3


class GridMismatchError(BellDecoherenceError):
    """Traces being compared do not share a time grid."""
    exit_code = 5


class ToleranceExceededError(BellDecoherenceError):
    """A compared pair deviates by more than the declared tolerance."""
    exit_code = 1
