"""Exception types shared across the package."""


class WavefuseError(Exception):
    """Base class for wavefuse errors."""


class CapacityExceeded(WavefuseError):
    """A line or plane does not fit the engine's transfer areas."""


class NotCalibrated(WavefuseError):
    """Cost-model prediction requested before calibration."""


class CalibrationFailed(WavefuseError):
    """Anchor fit did not converge within tolerance.

    Carries a per-anchor residual report in ``residuals``.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


class ExtrapolationRefused(WavefuseError):
    """Queried size lies outside the cost table's grid hull."""


class ParseError(WavefuseError):
    """Malformed input file; ``offset`` is the byte position when known."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class InvalidInput(WavefuseError):
    """Frame sequences disagree in length or dimensions."""
