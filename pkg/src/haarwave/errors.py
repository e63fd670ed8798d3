"""Exception hierarchy shared by all haarwave modules."""


class HaarwaveError(Exception):
    """Base class for every error raised by this package."""


class ExpressionError(HaarwaveError):
    """Problem with a formula: parsing or evaluation."""


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message, offset, source=None):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExpressionError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class UnknownFunctionError(ExpressionError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown function {name!r} at offset {offset}")


class ArityError(ExpressionError):
    def __init__(self, name, expected, got, offset):
        self.name = name
        self.expected = expected
        self.got = got
        self.offset = offset
        super().__init__(
            f"function {name!r} takes {expected} argument(s), got {got} (offset {offset})"
        )


class EvaluationDomainError(ExpressionError):
    """Arithmetic produced a non-finite value (division by zero, log(<=0), ...)."""


class ProblemError(HaarwaveError):
    """Malformed or inconsistent problem definition."""


class IncompatibleDataError(ProblemError):
    """Initial data violate the compatibility conditions (strict mode only)."""


class LinearAlgebraError(HaarwaveError):
    pass


class SingularMatrixError(LinearAlgebraError):
    def __init__(self, message, pivot_index=None):
        self.pivot_index = pivot_index
        super().__init__(message)


class ConvergenceError(LinearAlgebraError):
    def __init__(self, message, iterations):
        self.iterations = iterations
        super().__init__(message)


class ResourceLimitError(HaarwaveError):
    """Requested discretization exceeds the dense-matrix budget."""


class SolverError(HaarwaveError):
    def __init__(self, message, step=None):
        self.step = step
        super().__init__(message)
