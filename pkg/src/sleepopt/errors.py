"""Exception hierarchy shared across the pipeline.

Every error that callers are expected to catch derives from SleepOptError,
so the CLI and the HTTP service can map the whole family to a single
"data/validation" exit path while letting programming errors propagate.
"""


class SleepOptError(Exception):
    """Base class for all validation and data errors raised by sleepopt."""


# --- survey ingestion ---------------------------------------------------

class SchemaError(SleepOptError):
    """Schema document violates a structural invariant."""


class MissingColumn(SleepOptError):
    def __init__(self, name: str):
        super().__init__(f"survey file is missing required column {name!r}")
        self.name = name


class MalformedRow(SleepOptError):
    def __init__(self, line: int, detail: str = ""):
        msg = f"malformed row at line {line}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.line = line


class EmptyFile(SleepOptError):
    pass


class UnknownAnswer(SleepOptError):
    def __init__(self, field: str, value):
        super().__init__(f"answer {value!r} is not a valid level for field {field!r}")
        self.field = field
        self.value = value


class MissingRequired(SleepOptError):
    def __init__(self, field: str):
        super().__init__(f"required field {field!r} is missing or empty")
        self.field = field


class InconsistentTimes(SleepOptError):
    pass


class EmptyColumn(SleepOptError):
    pass


class NonPositiveHeight(SleepOptError):
    pass


class NonPositiveWeight(SleepOptError):
    pass


class RatioSum(SleepOptError):
    pass


class TooFewSamples(SleepOptError):
    pass


class TargetTooSmall(SleepOptError):
    pass


class BadNoise(SleepOptError):
    pass


# --- model training and evaluation --------------------------------------

class SingleClassData(SleepOptError):
    pass


class EmptyData(SleepOptError):
    pass


class DegenerateLeaf(SleepOptError):
    pass


class DimensionMismatch(SleepOptError):
    pass


class ModelFormatError(SleepOptError):
    """Model artifact fails schema or invariant validation on load."""


# --- attribution ----------------------------------------------------------

class ZeroCover(SleepOptError):
    pass


class TooManyFeatures(SleepOptError):
    pass


class EmptyReport(SleepOptError):
    pass


class MissingFeature(SleepOptError):
    def __init__(self, name: str):
        super().__init__(f"weight vector has no entry for actionable field {name!r}")
        self.name = name


# --- optimization ---------------------------------------------------------

class BaselineOutOfBounds(SleepOptError):
    def __init__(self, field: str, value, lower, upper):
        super().__init__(
            f"baseline {value} for {field!r} outside bounds [{lower}, {upper}]"
        )
        self.field = field


class NegativeLambda(SleepOptError):
    pass


class TooManyVariables(SleepOptError):
    pass


class BadK(SleepOptError):
    pass


# --- reporting ------------------------------------------------------------

class IoFailure(SleepOptError):
    pass
