"""Exception hierarchy shared by every curvlab module."""


class CurvlabError(Exception):
    """Base class for all errors raised by curvlab."""


class InputError(CurvlabError, ValueError):
    """Malformed user input: bad indices, orders, spec files, names."""


class ParseError(InputError):
    """Syntax error in an expression, with the byte offset where it was found."""

    def __init__(self, message, offset, text=None, expected=None):
        self.offset = offset
        self.text = text
        self.expected = expected
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class SingularEvaluationError(CurvlabError, ArithmeticError):
    """Evaluation left the domain of a function (log of a negative, 1/0, ...)."""

    def __init__(self, message, function=None):
        self.function = function
        super().__init__(message)


class SingularMetricError(SingularEvaluationError):
    """The metric is degenerate (or numerically close to it) at the point."""
