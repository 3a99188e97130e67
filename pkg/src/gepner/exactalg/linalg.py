"""Dense exact linear algebra over QQ.

Elimination is fraction-free (Bareiss) on integer-scaled rows; the final
back substitution divides once per pivot, so intermediate growth stays
polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Sequence

from .rational import ONE, QQ, ZERO, qq


class LinearAlgebraError(ValueError):
    pass


class NoSolution(LinearAlgebraError):
    """The system A x = b is inconsistent."""


class QMatrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence], ncols: int | None = None):
        self.rows = [[qq(x) for x in row] for row in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        if any(len(r) != ncols for r in self.rows):
            raise LinearAlgebraError("ragged matrix")

    @classmethod
    def zeros(cls, m: int, n: int) -> "QMatrix":
        return cls([[ZERO] * n for _ in range(m)], n)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def column(cls, values) -> "QMatrix":
        return cls([[v] for v in values], 1)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self.rows == other.rows and self.ncols == other.ncols

    def __repr__(self):
        return f"QMatrix({[[str(x) for x in r] for r in self.rows]})"

    def transpose(self) -> "QMatrix":
        return QMatrix([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)], self.nrows)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise LinearAlgebraError("dimension mismatch")
        cols = other.transpose().rows
        return QMatrix(
            [[sum((a * b for a, b in zip(r, c)), ZERO) for c in cols] for r in self.rows], other.ncols
        )

    def __add__(self, other):
        return QMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other):
        return QMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def scale(self, c) -> "QMatrix":
        c = qq(c)
        return QMatrix([[c * a for a in r] for r in self.rows], self.ncols)

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def col(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def hstack(self, other: "QMatrix") -> "QMatrix":
        return QMatrix([a + b for a, b in zip(self.rows, other.rows)], self.ncols + other.ncols)

    def rank(self) -> int:
        return len(row_echelon(self.rows, self.ncols)[1])

    def det(self):
        if self.nrows != self.ncols:
            raise LinearAlgebraError("determinant of a non-square matrix")
        return bareiss_det(self.rows)

    def inverse(self) -> "QMatrix":
        n = self.nrows
        if n != self.ncols:
            raise LinearAlgebraError("inverse of a non-square matrix")
        sol = linear_solve(self, QMatrix.identity(n))
        if sol.kernel:
            raise LinearAlgebraError("matrix is singular")
        return sol.particular

    def kernel(self) -> list[list]:
        return linear_solve(self, QMatrix.zeros(self.nrows, 1)).kernel


def _integer_rows(rows):
    out = []
    for r in rows:
        den = 1
        for x in r:
            den = lcm(den, int(QQ(x).denominator))
        out.append([int(QQ(x) * den) for x in r])
    return out


def row_echelon(rows, ncols: int):
    """Fraction-free forward elimination.

    Returns ``(echelon_rows, pivots)`` with integer rows; ``pivots`` lists the
    pivot column of each nonzero row.
    """
    a = _integer_rows(rows)
    m = len(a)
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= m:
            break
        p = next((i for i in range(r, m) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        for i in range(r + 1, m):
            f = a[i][c]
            a[i] = [(piv * x - f * y) // prev for x, y in zip(a[i], a[r])]
        # Bareiss exact division keeps entries integral.
        prev = piv
        pivots.append(c)
        r += 1
    return a[:r], pivots


def bareiss_det(rows):
    n = len(rows)
    if n == 0:
        return ONE
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, int(QQ(x).denominator))
    a = [[int(QQ(x) * den) for x in r] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return ZERO
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return QQ(sign * a[n - 1][n - 1], den**n)


@dataclass(frozen=True)
class Solution:
    particular: QMatrix
    kernel: list[list]

    @property
    def nullity(self) -> int:
        return len(self.kernel)


def linear_solve(A: QMatrix, b: QMatrix) -> Solution:
    """Exact particular solution of ``A x = b`` plus a kernel basis of ``A``.

    Free variables are set to zero in the particular solution. Raises
    ``NoSolution`` when the system is inconsistent.
    """
    if A.nrows != b.nrows:
        raise LinearAlgebraError("dimension mismatch")
    n = A.ncols
    aug = [ra + rb for ra, rb in zip(A.rows, b.rows)]
    ech, pivots = row_echelon(aug, n + b.ncols)
    for row, pc in zip(ech, pivots):
        if pc >= n:
            raise NoSolution("inconsistent linear system")
    # back substitution to reduced form, over QQ
    red = [[QQ(x) for x in row] for row in ech]
    for i in range(len(red) - 1, -1, -1):
        pc = pivots[i]
        inv = ONE / red[i][pc]
        red[i] = [x * inv for x in red[i]]
        for j in range(i):
            f = red[j][pc]
            if f:
                red[j] = [x - f * y for x, y in zip(red[j], red[i])]
    particular = [[ZERO] * b.ncols for _ in range(n)]
    for i, pc in enumerate(pivots):
        particular[pc] = red[i][n:]
    pivset = set(pivots)
    kernel = []
    for free in range(n):
        if free in pivset:
            continue
        v = [ZERO] * n
        v[free] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][free]
        kernel.append(v)
    return Solution(QMatrix(particular, b.ncols), kernel)


def solve_vector(A: QMatrix, rhs: Sequence) -> tuple[list, list[list]]:
    sol = linear_solve(A, QMatrix.column(rhs))
    return sol.particular.col(0), sol.kernel


def rank_of(vectors: Sequence[Sequence]) -> int:
    """Rank of a list of row vectors."""
    if not vectors:
        return 0
    return QMatrix(vectors).rank()
