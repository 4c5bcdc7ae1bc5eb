"""Error types shared across the engine.

Every error carries a stable ``code`` string so the CLI and the HTTP
service can map failures to exit codes / status codes without parsing
messages.
"""


class EngineError(Exception):
    """Base class for all engine errors."""

    code = "ENGINE_ERROR"

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{self.code}: {msg}" if msg else self.code


class FormatError(EngineError):
    code = "FORMAT_ERROR"


class CountMismatchError(EngineError):
    code = "COUNT_MISMATCH"


class NonFiniteValueError(EngineError):
    code = "NONFINITE_VALUE"


class UnknownFeatureError(EngineError):
    code = "UNKNOWN_FEATURE"


class FilterSyntaxError(EngineError):
    code = "FILTER_SYNTAX"


class DegenerateInputError(EngineError):
    code = "DEGENERATE_INPUT"


class UnknownProjectionError(EngineError):
    code = "UNKNOWN_PROJECTION"


class EmptySelectionError(EngineError):
    code = "EMPTY_SELECTION"


class TooFewPointsError(EngineError):
    code = "TOO_FEW_POINTS"


class TooManyPointsError(EngineError):
    code = "TOO_MANY_POINTS"


class KOutOfRangeError(EngineError):
    code = "K_OUT_OF_RANGE"


class OutOfRangeError(EngineError):
    code = "OUT_OF_RANGE"


class MissingPositionError(EngineError):
    code = "MISSING_POSITION"


class EmptyClusterError(EngineError):
    code = "EMPTY_CLUSTER"


class InvalidConfigError(EngineError):
    code = "INVALID_CONFIG"
