"""Exception hierarchy shared by all tripol modules."""


class TripolError(Exception):
    """Base class for every error raised by tripol."""


class InvalidArgument(TripolError, ValueError):
    """An argument is outside its documented domain."""


class PreconditionViolation(TripolError, ValueError):
    """An operation was applied to a state that does not meet its precondition."""


class UnsupportedConfiguration(TripolError, ValueError):
    """The configuration is valid but outside what the criteria forms assume."""


class InvalidState(TripolError, ValueError):
    """A covariance matrix is not symmetric positive semidefinite."""


class DegenerateSNL(TripolError, ArithmeticError):
    """The shot-noise normalization 4|alpha_c^2 - alpha_a^2| vanishes."""


class NumericalDegeneracy(TripolError, ArithmeticError):
    """A quadratic in the gain has no strict minimum."""
