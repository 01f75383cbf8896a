"""Exception types raised across the toolkit."""


class DiarBenchError(Exception):
    """Base class for every error raised by diarbench."""


class ConfigError(DiarBenchError):
    """Invalid configuration or input file (CLI exit code 1)."""


class EvaluationError(DiarBenchError):
    """Failure while scoring (CLI exit code 2)."""


class RecordingMismatch(EvaluationError):
    def __init__(self, expected: str, got: str):
        super().__init__(f"recording id mismatch: {expected!r} != {got!r}")
        self.expected = expected
        self.got = got


class ParseError(ConfigError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class MalformedLine(ParseError):
    pass


class NegativeDuration(ParseError):
    pass


class PrecisionLoss(ParseError):
    pass


class EmptyRegion(ParseError):
    pass


class DuplicateRecordingId(ConfigError):
    pass


class MissingField(ConfigError):
    def __init__(self, name: str):
        super().__init__(f"missing field {name!r}")
        self.name = name


class BadDuration(ConfigError):
    pass


class UndefinedDer(EvaluationError):
    """DER requested with a zero denominator."""


class ZeroCompletionTime(EvaluationError):
    pass


class UnknownRecording(EvaluationError):
    pass


class MissingReference(EvaluationError):
    pass


class MissingSystemOutput(EvaluationError):
    pass


class ManifestMismatch(EvaluationError):
    pass


class ReportInconsistent(EvaluationError):
    pass


class EmptyMask(DiarBenchError):
    pass


class BadThresholds(ConfigError):
    pass


class NoOverlapWarning(UserWarning):
    """Permutation alignment was asked to align windows that share no frames."""
