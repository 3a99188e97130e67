"""Matrices and vectors whose entries are ``TruncSeries``.

Plain nested lists; ``M[i][j]`` is row i, column j. Column vectors are flat
lists.
"""

from __future__ import annotations

from typing import Sequence

from .linalg import QMatrix
from .rational import ONE, ZERO
from .series import PrecisionError, TruncSeries, min_order

SMat = list[list[TruncSeries]]
SVec = list[TruncSeries]


def zeros(m: int, n: int, nvars: int, order=None) -> SMat:
    return [[TruncSeries.zero(nvars, order) for _ in range(n)] for _ in range(m)]


def identity(n: int, nvars: int, order=None) -> SMat:
    return [
        [TruncSeries.constant(nvars, 1 if i == j else 0, order) for j in range(n)] for i in range(n)
    ]


def from_qmatrix(Q: QMatrix, nvars: int, order=None) -> SMat:
    return [[TruncSeries.constant(nvars, x, order) for x in row] for row in Q.rows]


def constant_part(M: SMat) -> QMatrix:
    return QMatrix([[x.constant_term() for x in row] for row in M])


def transpose(M: SMat) -> SMat:
    return [list(col) for col in zip(*M)]


def matmul(A: SMat, B: SMat) -> SMat:
    n = len(B)
    cols = transpose(B)
    out = []
    for row in A:
        out_row = []
        for col in cols:
            acc = None
            for k in range(n):
                if row[k].terms and col[k].terms:
                    term = row[k] * col[k]
                    acc = term if acc is None else acc + term
            target = min_order(_order(row), _order(col))
            if acc is None:
                acc = TruncSeries.zero(row[0].nvars, target)
            elif target is not None and (acc.order is None or acc.order > target):
                acc = acc.truncate(target)
            out_row.append(acc)
        out.append(out_row)
    return out


def _order(entries):
    o = None
    for x in entries:
        o = min_order(o, x.order)
    return o


def matvec(A: SMat, v: SVec) -> SVec:
    return [r[0] for r in matmul(A, [[x] for x in v])]


def add(A: SMat, B: SMat) -> SMat:
    return [[a + b for a, b in zip(r, s)] for r, s in zip(A, B)]


def sub(A: SMat, B: SMat) -> SMat:
    return [[a - b for a, b in zip(r, s)] for r, s in zip(A, B)]


def neg(A: SMat) -> SMat:
    return [[-a for a in r] for r in A]


def scale(A: SMat, c) -> SMat:
    return [[a.scale(c) for a in r] for r in A]


def commutator(A: SMat, B: SMat) -> SMat:
    return sub(matmul(A, B), matmul(B, A))


def deriv(A: SMat, i: int) -> SMat:
    return [[a.deriv(i) for a in r] for r in A]


def truncate(A: SMat, order) -> SMat:
    return [[a.truncate(order) for a in r] for r in A]


def truncate_vec(v: SVec, order) -> SVec:
    return [a.truncate(order) for a in v]


def compose(A: SMat, images) -> SMat:
    return [[a.compose(images) for a in r] for r in A]


def compose_vec(v: SVec, images) -> SVec:
    return [a.compose(images) for a in v]


def inverse(A: SMat) -> SMat:
    """Inverse of a series matrix invertible at the origin (Neumann series)."""
    n = len(A)
    if n == 0:
        return []
    nvars = A[0][0].nvars
    order = _order([x for r in A for x in r])
    if order is None:
        raise PrecisionError("inverse of an exact polynomial matrix needs an explicit order")
    A0inv = from_qmatrix(constant_part(A).inverse(), nvars, order)
    # A = A0 (I + N) with N having zero constant part
    N = matmul(A0inv, A)
    N = sub(N, identity(n, nvars, order))
    out = identity(n, nvars, order)
    power = identity(n, nvars, order)
    for _ in range(order):
        power = neg(matmul(power, N))
        if all(x.is_zero() for r in power for x in r):
            break
        out = add(out, power)
    return matmul(out, A0inv)


def first_nonzero(A: SMat, order=None):
    """Locate the first nonzero entry (row, col, exponent, coefficient)."""
    for i, row in enumerate(A):
        for j, x in enumerate(row):
            for e, c in sorted(x.terms.items(), key=lambda kv: (sum(kv[0]), kv[0])):
                if order is not None and sum(e) > order:
                    continue
                return i, j, e, c
    return None


def is_zero(A: SMat, order=None) -> bool:
    return first_nonzero(A, order) is None


def equal(A: SMat, B: SMat, order=None) -> bool:
    return is_zero(sub(A, B), order)


def as_text(A: SMat, names=None) -> list[list[str]]:
    return [[x.to_text(names) for x in r] for r in A]
