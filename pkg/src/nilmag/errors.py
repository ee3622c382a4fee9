"""Exception hierarchy.  Every error carries a machine-readable category."""


class NilmagError(Exception):
    category = "error"


class ParseError(NilmagError, ValueError):
    category = "parse"

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ValidationError(NilmagError, ValueError):
    category = "validation"


class CocycleError(ValidationError):
    """The 2-form is not closed; carries the failing basis triple."""

    def __init__(self, message, triple=None, residual=None):
        self.triple = triple
        self.residual = residual
        super().__init__(message)


class DimensionError(ValidationError):
    pass


class DivergenceError(NilmagError, ArithmeticError):
    category = "divergence"

    def __init__(self, message, time=None):
        self.time = time
        super().__init__(message)


class UnsupportedStepError(NilmagError):
    category = "unsupported-step"
