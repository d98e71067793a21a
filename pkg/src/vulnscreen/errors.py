"""Exception hierarchy. CLI exit codes are attached to the classes."""


class VulnscreenError(Exception):
    exit_code = 1


class SchemaError(VulnscreenError, ValueError):
    """Malformed or invalid schema file."""


class DataError(VulnscreenError, ValueError):
    """Input data that violates the schema or a dataset invariant."""


class SingleClassError(DataError):
    """An operation needs both classes but only one is present."""


class DegenerateFeatureError(DataError):
    """Feature takes a single value, so its contingency table has df = 0."""


class FingerprintMismatch(VulnscreenError):
    exit_code = 2


class ConvergenceError(VulnscreenError, ArithmeticError):
    exit_code = 3


class StageError(VulnscreenError):
    """Pipeline failure labelled with the stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)
