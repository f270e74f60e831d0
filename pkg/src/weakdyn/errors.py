"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class WeakDynError(Exception):
    exit_code = 1


class ParseError(WeakDynError):
    exit_code = 2

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(WeakDynError):
    exit_code = 2


class DimensionMismatch(ValidationError, ValueError):
    pass


class ZeroVector(ValidationError, ValueError):
    pass


class IncompleteBasis(ValidationError, ValueError):
    pass


class InvalidRange(ValidationError, ValueError):
    pass


class OutOfRange(ValidationError, ValueError):
    pass


class AliasedGrid(ValidationError, ValueError):
    pass


class OrthogonalPostselection(WeakDynError, ArithmeticError):
    exit_code = 3


class UndefinedTension(WeakDynError, ArithmeticError):
    exit_code = 3


class ZeroAmplitude(WeakDynError, ArithmeticError):
    exit_code = 3


class NumericalFailure(WeakDynError, ArithmeticError):
    exit_code = 4


class ConvergenceFailure(NumericalFailure):
    pass


class NumericalUnderflow(NumericalFailure):
    pass


class BadFlags(WeakDynError):
    exit_code = 5
