"""Errors raised by the copula test engine and its data loaders."""


class CopulaError(Exception):
    """Base class for every error raised by the copulas app."""


class DomainError(CopulaError, ValueError):
    """An argument lies outside the domain of the function (e.g. u not in [0, 1])."""


class DimensionMismatch(CopulaError, ValueError):
    """Multi-index, point or samples do not agree on the dimension p."""


class TiesPresent(CopulaError, ValueError):
    """A column of a sample contains duplicated values and ties are not allowed."""


class PairingError(CopulaError, ValueError):
    """Paired mode was requested for samples of unequal size."""


class DegenerateVariance(CopulaError, ArithmeticError):
    """The normalizing variance is zero while the selected statistic is not."""


class DataError(CopulaError, ValueError):
    """Input data could not be parsed; the message names the line and column."""


class UnsupportedFormat(CopulaError, ValueError):
    """Requested output format is not one of the supported writers."""
