"""Exception hierarchy.

The CLI maps these onto exit codes: precondition problems exit 2, search
caps exit 3, violated construction facts exit 4.
"""


class PrimeAddError(Exception):
    """Base class for every error raised by this package."""


class PreconditionViolated(PrimeAddError, ValueError):
    """An input does not satisfy the hypotheses of an operation."""

    def __init__(self, message, clause=None):
        super().__init__(message)
        self.clause = clause


class NotCoprime(PreconditionViolated):
    pass


class UndefinedSymbol(PreconditionViolated):
    pass


class InvalidG(PreconditionViolated):
    pass


class BadExponent(PreconditionViolated):
    pass


class NoQualifyingRole(PreconditionViolated):
    pass


class Inconsistent(PreconditionViolated):
    """Two congruences in a system cannot hold simultaneously."""

    def __init__(self, i, j, message=None):
        super().__init__(message or f"constraints {i} and {j} are inconsistent")
        self.pair = (i, j)


class BoundExhausted(PrimeAddError):
    """A search hit its cap. This says nothing about whether a solution exists."""

    def __init__(self, message, bound=None, step=None):
        super().__init__(message)
        self.bound = bound
        self.step = step


class BoundExceeded(BoundExhausted):
    """Factoring budget ran out."""


class SearchBoundExhausted(BoundExhausted):
    pass


class InternalAssertionFailed(PrimeAddError, AssertionError):
    """A fact that the construction proves did not hold for a concrete instance."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate
