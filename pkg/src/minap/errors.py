"""Exception hierarchy with stable machine-readable codes."""

from __future__ import annotations


class MinapError(Exception):
    """Base error; ``code`` is stable for machine consumption."""

    code = "ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code

    def to_json(self) -> dict:
        return {"error": self.code, "message": self.message}


class InvalidSpecError(MinapError):
    code = "INVALID_SPEC"


class OutOfRangeError(MinapError):
    code = "OUT_OF_RANGE"


class UnboundedError(MinapError):
    code = "UNBOUNDED"


class FiniteInputError(MinapError):
    code = "FINITE_INPUT"


class FiniteGroupError(MinapError):
    code = "FINITE_GROUP"


class SupportMismatchError(MinapError):
    code = "SUPPORT_MISMATCH"


class BudgetExceededError(MinapError):
    code = "BUDGET_EXCEEDED"


class ZeroElementError(MinapError):
    code = "ZERO_ELEMENT"


class InvalidParamsError(MinapError):
    code = "INVALID_PARAMS"


class NoCycleDetectedError(MinapError):
    code = "NO_CYCLE_DETECTED"


class DegenerateTargetError(MinapError):
    code = "DEGENERATE_TARGET"


class ExpInfiniteError(MinapError):
    code = "EXP_INFINITE"


class WindowInsufficientError(MinapError):
    code = "WINDOW_INSUFFICIENT"


class HypothesisFailError(MinapError):
    code = "HYPOTHESIS_FAIL"


class OrderMismatchError(MinapError):
    code = "ORDER_MISMATCH"


class NotABasisError(MinapError):
    code = "NOT_A_BASIS"


class CriterionFailError(MinapError):
    code = "CRITERION_FAIL"


class NotEventuallyPeriodicError(MinapError):
    code = "NOT_EVENTUALLY_PERIODIC"


class ParseError(MinapError):
    code = "PARSE_ERROR"

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.detail = message

    def to_json(self) -> dict:
        return {
            "error": self.code,
            "line": self.line,
            "column": self.column,
            "message": self.detail,
        }
