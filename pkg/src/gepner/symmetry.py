"""Symmetric functions: elementary symmetric polynomials, the Gepner
polynomials G_{k,n}, the Vandermonde product and S_n (anti)symmetrization."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .exactalg.poly import MultiPoly, d_mul, exact_divide, variables

X = "x"
Y = "y"


class NotSymmetricError(ValueError):
    pass


def xvars(n: int) -> tuple[str, ...]:
    return variables(X, n)


def yvars(n: int) -> tuple[str, ...]:
    return variables(Y, n)


def elementary_symmetric(i: int, n: int, names=None) -> MultiPoly:
    if not 1 <= i <= n:
        raise ValueError(f"need 1 <= i <= n, got i={i}, n={n}")
    names = tuple(names) if names is not None else xvars(n)
    terms = {}
    for combo in itertools.combinations(range(n), i):
        terms[tuple(int(j in combo) for j in range(n))] = 1
    return MultiPoly(names, terms)


def power_sum(k: int, n: int, names=None) -> MultiPoly:
    names = tuple(names) if names is not None else xvars(n)
    return MultiPoly(names, {tuple(k if j == i else 0 for j in range(n)): 1 for i in range(n)})


@dataclass(frozen=True)
class SymmetricChangeOfVariables:
    """y_i = sigma_i(x_1, ..., x_n)."""

    n: int

    @property
    def xs(self) -> tuple[str, ...]:
        return xvars(self.n)

    @property
    def ys(self) -> tuple[str, ...]:
        return yvars(self.n)

    @property
    def images(self) -> dict[str, MultiPoly]:
        return {y: elementary_symmetric(i + 1, self.n) for i, y in enumerate(self.ys)}

    def pull_back(self, p: MultiPoly) -> MultiPoly:
        """p(y) -> p(sigma(x)), as a polynomial in x_1..x_n."""
        return p.substitute(self.images).extend(self.xs)

    def generating_identity_holds(self) -> bool:
        # 1 + sum y_i T^i == prod (1 + x_i T) after substitution
        T = MultiPoly.var(("T",), "T")
        lhs = MultiPoly.one(("T",))
        for i, e in enumerate(self.images.values()):
            lhs = lhs + e * T ** (i + 1)
        rhs = MultiPoly.one(("T",))
        for x in self.xs:
            rhs = rhs * (1 + MultiPoly.var(self.xs, x) * T)
        return lhs == rhs


@lru_cache(maxsize=None)
def _newton_power_sums(k: int, n: int) -> tuple[MultiPoly, ...]:
    ys = yvars(n)
    e = [MultiPoly.one(ys)] + [MultiPoly.var(ys, y) for y in ys]
    p = [MultiPoly.constant(ys, n)]
    for m in range(1, k + 1):
        acc = MultiPoly.zero(ys)
        for i in range(1, min(m, n + 1)):
            acc = acc + (e[i] * p[m - i]) * (-1) ** (i - 1)
        if m <= n:
            acc = acc + e[m] * ((-1) ** (m - 1) * m)
        p.append(acc)
    return tuple(p)


def gepner_polynomial(k: int, n: int) -> MultiPoly:
    """The polynomial G_{k,n}(y) with G(sigma(x)) = x_1^k + ... + x_n^k."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    return _newton_power_sums(k, n)[k]


def fermat_polynomial(k: int, n: int) -> MultiPoly:
    return power_sum(k, n)


def vandermonde(n: int, names=None) -> MultiPoly:
    names = tuple(names) if names is not None else xvars(n)
    out = MultiPoly.one(names)
    for i in range(n):
        for j in range(i + 1, n):
            out = out * (MultiPoly.var(names, names[i]) - MultiPoly.var(names, names[j]))
    return out


def permutation_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def symmetrize(p: MultiPoly, character: str = "trivial", names=None) -> MultiPoly:
    """Sum of w.p over all permutations w of ``names``, weighted by the
    character (``"trivial"`` or ``"sign"``); no 1/n! factor."""
    if character not in ("trivial", "sign"):
        raise ValueError(f"unknown character {character!r}")
    names = tuple(names) if names is not None else p.vars
    n = len(names)
    out = MultiPoly.zero(p.vars)
    for perm in itertools.permutations(range(n)):
        term = p.permute(perm, names)
        if character == "sign" and permutation_sign(perm) < 0:
            out = out - term
        else:
            out = out + term
    return out


def _transpositions(n):
    for i in range(n - 1):
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        yield perm


def is_symmetric(p: MultiPoly, names=None) -> bool:
    names = tuple(names) if names is not None else p.vars
    return all(p.permute(t, names) == p for t in _transpositions(len(names)))


def is_alternating(p: MultiPoly, names=None) -> bool:
    names = tuple(names) if names is not None else p.vars
    return all(p.permute(t, names) == -p for t in _transpositions(len(names)))


@lru_cache(maxsize=None)
def _elementary_monomial(n: int, ye: tuple) -> dict:
    """Terms of prod_i sigma_i^ye[i] in x_1..x_n, built one factor at a time."""
    if not any(ye):
        return {(0,) * n: 1}
    i = max(j for j, k in enumerate(ye) if k)
    prev = _elementary_monomial(n, ye[:i] + (ye[i] - 1,) + ye[i + 1 :])
    return d_mul(prev, elementary_symmetric(i + 1, n).terms)


def rewrite_in_elementary(p: MultiPoly, n: int | None = None) -> MultiPoly:
    """Express a symmetric polynomial in x_1..x_n through y_i = sigma_i(x).

    Leading-term elimination in lex order (fundamental theorem of symmetric
    polynomials).
    """
    if n is None:
        n = sum(1 for v in p.vars if v.startswith(X))
    xs, ys = xvars(n), yvars(n)
    p = p.extend(xs)
    if not is_symmetric(p):
        raise NotSymmetricError("input is not S_n-invariant")
    rem = dict(p.terms)
    out: dict = {}
    while rem:
        lead = max(rem)  # lex order
        c = rem.pop(lead)
        ye = tuple(lead[i] - (lead[i + 1] if i + 1 < n else 0) for i in range(n))
        out[ye] = out.get(ye, 0) + c
        for e, v in _elementary_monomial(n, ye).items():
            if e == lead:
                continue
            nv = rem.get(e, 0) - c * v
            if nv:
                rem[e] = nv
            else:
                rem.pop(e, None)
    return MultiPoly(ys, out)


def divide_by_vandermonde(p: MultiPoly, n: int) -> MultiPoly:
    """Exact quotient of an alternating polynomial by the Vandermonde product."""
    return exact_divide(p.extend(xvars(n)), vandermonde(n))
