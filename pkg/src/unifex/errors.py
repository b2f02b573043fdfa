"""Exception hierarchy.

Precondition failures derive from :class:`PreconditionError` (a ``ValueError``);
numerical failures (non-convergence, overflow, degenerate denominators) derive
from :class:`NumericalError` (an ``ArithmeticError``). The CLI maps the two
families to exit codes 1 and 2.
"""


class UnifexError(Exception):
    pass


class PreconditionError(UnifexError, ValueError):
    pass


class PoleError(PreconditionError):
    """Argument sits on a pole of the gamma function."""


class UnsupportedError(PreconditionError):
    pass


class NumericalError(UnifexError, ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    def __init__(self, msg, z=None):
        super().__init__(msg)
        self.z = z


class NorlundOverflowError(NumericalError):
    pass


class DegenerateDenominatorError(NumericalError):
    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class EmptyPoleSetError(NumericalError):
    pass


class NotFittableError(NumericalError):
    pass
