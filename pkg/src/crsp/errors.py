"""Exception hierarchy; each class carries the CLI exit code it maps to."""


class CrspError(Exception):
    exit_code = 1


class ValidationError(CrspError, ValueError):
    """Input violates a documented precondition."""

    exit_code = 2


class ConvergenceError(CrspError, ArithmeticError):
    """The Gibbs-weighted walk matrix has spectral radius too close to 1."""

    exit_code = 3


class NumericError(CrspError, ArithmeticError):
    """A linear solve produced singular, underflowed or nonfinite values."""

    exit_code = 3


class FormatError(CrspError, OSError):
    """A graph, manifest or labels file is missing or does not parse."""

    exit_code = 4
