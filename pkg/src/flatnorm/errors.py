"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class FlatNormError(Exception):
    """Base class for all errors raised by :mod:`flatnorm`."""


# -- complex / geometry -------------------------------------------------------


class DegenerateSimplex(FlatNormError):
    def __init__(self, message: str, simplex=None):
        super().__init__(message)
        self.simplex = simplex


class IndexOutOfRange(FlatNormError):
    pass


class DimensionOutOfRange(FlatNormError):
    pass


class DimensionMismatch(FlatNormError):
    pass


class NegativeWeight(FlatNormError):
    pass


class MissingCoordinates(FlatNormError):
    pass


# -- lp / msfn ----------------------------------------------------------------


class NotOptimal(FlatNormError):
    pass


class InfeasibleProblem(FlatNormError):
    pass


class NodeBudgetExceeded(FlatNormError):
    """Branch and bound ran out of nodes; ``incumbent`` holds the best point found."""

    def __init__(self, message: str, incumbent=None):
        super().__init__(message)
        self.incumbent = incumbent


# -- tu -----------------------------------------------------------------------


class SizeCapExceeded(FlatNormError):
    pass


class WrongDimension(FlatNormError):
    pass


# -- deform -------------------------------------------------------------------


class InvalidDimension(FlatNormError):
    pass


class CurveOutsideComplex(FlatNormError):
    pass


class CenterSamplingFailed(FlatNormError):
    def __init__(self, message: str, simplex=None):
        super().__init__(message)
        self.simplex = simplex


# -- file formats -------------------------------------------------------------


class ParseError(FlatNormError):
    def __init__(self, message: str, line: int | None = None, path=None):
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line
        self.path = path


class InconsistentIndexing(ParseError):
    pass


class NonTriangularFace(ParseError):
    pass


class UnknownSimplex(ParseError):
    def __init__(self, message: str, simplex=None, line: int | None = None, path=None):
        super().__init__(message, line=line, path=path)
        self.simplex = simplex


class NonIntegerCoefficient(ParseError):
    pass
