"""Exception types raised across the package."""


class DiagnosisError(Exception):
    """Base class for all package errors."""


class DegenerateSample(DiagnosisError, ValueError):
    pass


class TooFewSamples(DiagnosisError, ValueError):
    pass


class BadWidth(DiagnosisError, ValueError):
    pass


class InsufficientExtrema(DiagnosisError, ValueError):
    pass


class SingleClassData(DiagnosisError, ValueError):
    pass


class DimensionMismatch(DiagnosisError, ValueError):
    pass


class MissingBranchData(DiagnosisError, ValueError):
    pass


class EmptyClass(DiagnosisError, ValueError):
    pass


class LengthMismatch(DiagnosisError, ValueError):
    pass


class UndefinedForEmptyClass(DiagnosisError, ValueError):
    pass


class ParseError(DiagnosisError, ValueError):
    """A dataset file could not be parsed.

    ``line`` is the 1-based line number in the file (0 when the failure is
    not tied to a line, e.g. undecodable bytes).
    """

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class EmptyFile(DiagnosisError, ValueError):
    pass


class VersionMismatch(DiagnosisError, ValueError):
    pass


class CorruptArtifact(DiagnosisError, ValueError):
    pass


class StageError(DiagnosisError, RuntimeError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
