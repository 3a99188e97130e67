"""Exact arithmetic kernel: rationals, sparse polynomials, truncated series
and dense linear algebra."""

from .linalg import LinearAlgebraError, NoSolution, QMatrix, Solution, linear_solve
from .poly import MultiPoly, grevlex_key, variables
from .rational import QQ, qq
from .series import PrecisionError, TruncSeries

__all__ = [
    "LinearAlgebraError",
    "MultiPoly",
    "NoSolution",
    "PrecisionError",
    "QMatrix",
    "QQ",
    "Solution",
    "TruncSeries",
    "grevlex_key",
    "linear_solve",
    "qq",
    "variables",
]
