"""Exception hierarchy shared by every module.

The CLI maps these onto exit statuses: input problems exit with 2,
:class:`EnumerationCapExceeded` with 3 and :class:`NonConvergence` with 4.
"""


class WorkbenchError(Exception):
    """Base class for all errors raised by ldworkbench."""


class InvalidInput(WorkbenchError, ValueError):
    """Input data violates a documented precondition."""


class SpaceMismatch(InvalidInput):
    pass


class AbsContViolation(InvalidInput):
    """Some outcome is charged by the first measure but not by the second."""


class NotAProductSpace(InvalidInput):
    pass


class FaithfulnessError(InvalidInput):
    """A strictly positive measure was required."""


class AlphaOutOfRange(InvalidInput):
    pass


class ThetaOutOfOpenRange(InvalidInput):
    pass


class ThetaOutOfRange(InvalidInput):
    pass


class DegenerateVariable(InvalidInput):
    """The random variable is constant on the support of the measure."""


class OrderTooLarge(InvalidInput):
    pass


class SOutOfRange(InvalidInput):
    pass


class AlphabetTooLarge(InvalidInput):
    pass


class SupportNotInvariant(InvalidInput):
    pass


class EmptySample(InvalidInput):
    pass


class EnumerationCapExceeded(WorkbenchError):
    """An exact enumeration would exceed the configured atom/type cap."""


class NonConvergence(WorkbenchError, ArithmeticError):
    pass


class QuadratureNonConvergence(NonConvergence):
    pass


class UndefinedArithmetic(NonConvergence):
    """An extended-real computation hit an indeterminate form such as inf - inf."""
