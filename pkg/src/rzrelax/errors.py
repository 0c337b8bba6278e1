"""Exception hierarchy shared by every module.

The command line maps each class to an exit code and a short machine code.
"""


class RZError(Exception):
    """Base class for library errors."""

    code = "rz_error"
    exit_code = 3


class UsageError(RZError, ValueError):
    code = "usage"
    exit_code = 2


class ParseError(UsageError):
    code = "parse"


class DimensionError(UsageError):
    code = "dimension"


class CapacityError(UsageError):
    code = "capacity"


class PreconditionError(UsageError):
    """An input violates a documented precondition (for example p(0) != 1)."""

    code = "precondition"


class NumericalError(RZError, ArithmeticError):
    code = "numerical"
    exit_code = 3


class NotPSDError(NumericalError):
    code = "not_psd"


class NotInteriorError(NumericalError):
    code = "not_interior"


class NonOrthogonalError(UsageError):
    code = "non_orthogonal"


class NotRealZeroError(NumericalError):
    code = "not_real_zero"
    exit_code = 1
