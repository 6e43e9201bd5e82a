from typing import Any

from src.core.constants import ExitStatus


class ParacheckError(Exception):
    """Base error carrying the process exit status it maps to."""

    exit_status: ExitStatus = ExitStatus.INPUT_ERROR

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def __str__(self) -> str:
        if not self.context:
            return self.detail
        extra = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"{self.detail} ({extra})"


class InputError(ParacheckError):
    exit_status = ExitStatus.INPUT_ERROR


class SpecSyntaxError(InputError):
    def __init__(self, detail: str, line: int | None = None, column: int | None = None, **context: Any):
        super().__init__(detail, line=line, column=column, **context)
        self.line = line
        self.column = column


class MissingSectionError(InputError):
    pass


class OrderBoundError(InputError):
    pass


class IncompleteInputError(InputError):
    pass


class CoefficientEvaluationError(InputError):
    pass


class DegeneracyError(ParacheckError):
    exit_status = ExitStatus.INCONCLUSIVE


class SeparationError(ParacheckError):
    exit_status = ExitStatus.INCONCLUSIVE


class TruncationError(ParacheckError):
    exit_status = ExitStatus.INCONCLUSIVE
