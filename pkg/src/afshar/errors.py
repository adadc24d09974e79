"""Exception types raised by the simulator.

Every error carries a short ``code`` string so that callers (the CLI, the
acceptance checks) can report the failure mode without parsing messages.
"""


class AfsharError(ValueError):
    code = "error"

    def __str__(self):
        msg = super().__str__()
        return f"{self.code}: {msg}" if msg else self.code


class InvalidBoundsError(AfsharError):
    code = "invalid-bounds"


class TooFewPointsError(AfsharError):
    code = "too-few-points"


class ZeroFieldError(AfsharError):
    code = "zero-field"


class UndersampledSourceError(AfsharError):
    code = "undersampled-source"


class UndersampledTargetError(AfsharError):
    code = "undersampled-target"


class GridTooCoarseError(AfsharError):
    code = "grid-too-coarse"


class SlitsOutsideGridError(AfsharError):
    code = "slits-outside-grid"


class WireTooThinError(AfsharError):
    code = "wire-too-thin-for-grid"


class WiresOutsideGridError(AfsharError):
    code = "wires-outside-grid"


class GridMismatchError(AfsharError):
    code = "grid-mismatch"


class NoDetectionsError(AfsharError):
    code = "no-detections"


class NotNormalizedError(AfsharError):
    code = "not-normalized"


class DarkPointError(AfsharError):
    code = "dark-point"


class OutOfRangeError(AfsharError):
    code = "out-of-range"


class PeaksNotFoundError(AfsharError):
    code = "peaks-not-found"


class ConfigError(AfsharError):
    code = "config-error"


class ConfigParseError(ConfigError):
    code = "parse-error"

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)


class ConfigValidationError(ConfigError):
    code = "validation-error"
