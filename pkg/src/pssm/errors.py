"""Exception hierarchy shared across the package."""


class PSSMError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(PSSMError, ZeroDivisionError):
    pass


class DegenerateSubstitution(PSSMError, ArithmeticError):
    """A denominator collapsed to the zero polynomial under substitution."""


class UnboundedSupport(PSSMError, ValueError):
    pass


class VarMismatch(PSSMError, ValueError):
    pass


class ModelError(PSSMError, ValueError):
    """Problem definition error, optionally located in DSL source."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class ParseError(ModelError):
    pass


class UnknownFunction(ModelError):
    pass


class UnknownIdentifier(ModelError):
    pass


class BadDerivative(ModelError):
    pass


class SeedError(ModelError):
    pass


class NotReducible(ModelError):
    pass


class UnknownProblem(ModelError, KeyError):
    def __str__(self):
        return self.message


class UnreliableMatch(PSSMError, ValueError):
    def __init__(self, bound, reliable):
        self.bound = bound
        self.reliable = reliable
        super().__init__(
            f"match bound {bound} exceeds the reliable degree {reliable}"
        )


class Inconsistent(PSSMError):
    """The system reduced to a nonzero constant equation."""

    def __init__(self, equation, monomial):
        self.equation = equation
        self.monomial = monomial
        super().__init__(
            f"inconsistent system: equation {equation} at monomial {monomial} "
            "reduces to a nonzero constant"
        )


class BranchLimit(PSSMError):
    pass


class AssumptionViolated(PSSMError):
    def __init__(self, divisor):
        self.divisor = divisor
        super().__init__(f"assumption violated: {divisor} vanishes")


class OutOfDomain(PSSMError, ValueError):
    pass


class SchemaError(PSSMError, ValueError):
    pass
