"""Sparse multivariate polynomials over QQ.

A polynomial is a tuple of variable names plus a dict mapping exponent
tuples to nonzero ``mpq`` coefficients. Binary operations on polynomials
with different variable sets first align both operands on the union of the
names (left operand's names first, then new names in order of appearance).
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Mapping

from .rational import ONE, QQ, ZERO, qq, to_text

Exp = tuple[int, ...]


def grevlex_key(exp: Exp):
    """Sort key: a larger key is a larger monomial in graded reverse lex."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


def exp_add(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


def exp_sub(a: Exp, b: Exp) -> Exp:
    return tuple(x - y for x, y in zip(a, b))


def exp_divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def exp_lcm(a: Exp, b: Exp) -> Exp:
    return tuple(max(x, y) for x, y in zip(a, b))


# -- raw dict kernels (used directly by the Groebner code) -------------------


def d_add(p: dict, q: dict, scale=ONE) -> dict:
    out = dict(p)
    for e, c in q.items():
        v = out.get(e, ZERO) + scale * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def d_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            v = out.get(e, ZERO) + c1 * c2
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def d_mul_term(p: dict, exp: Exp, coeff) -> dict:
    return {tuple(x + y for x, y in zip(e, exp)): c * coeff for e, c in p.items()}


def d_leading(p: dict) -> Exp:
    return max(p, key=grevlex_key)


class MultiPoly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Iterable[str], terms: Mapping[Exp, object] | None = None):
        self.vars = tuple(vars)
        n = len(self.vars)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match {n} variables")
            c = qq(c)
            if c:
                clean[e] = clean.get(e, ZERO) + c
                if not clean[e]:
                    del clean[e]
        self.terms = clean

    @classmethod
    def _raw(cls, vars: tuple[str, ...], terms: dict) -> "MultiPoly":
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.terms = terms
        return obj

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, vars) -> "MultiPoly":
        return cls(vars)

    @classmethod
    def constant(cls, vars, c) -> "MultiPoly":
        vars = tuple(vars)
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def one(cls, vars) -> "MultiPoly":
        return cls.constant(vars, 1)

    @classmethod
    def var(cls, vars, name: str) -> "MultiPoly":
        vars = tuple(vars)
        i = vars.index(name)
        return cls(vars, {tuple(int(j == i) for j in range(len(vars))): 1})

    @classmethod
    def monomial(cls, vars, exp: Exp, c=1) -> "MultiPoly":
        return cls(vars, {tuple(exp): c})

    @classmethod
    def gens(cls, vars) -> list["MultiPoly"]:
        return [cls.var(vars, v) for v in vars]

    # -- basic queries -------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, ZERO)

    def coeff(self, exp: Exp):
        return self.terms.get(tuple(exp), ZERO)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def weighted_degrees(self, weights) -> set:
        return {sum(QQ(w) * x for w, x in zip(weights, e)) for e in self.terms}

    def is_weighted_homogeneous(self, weights):
        """Return the common weight, or ``None`` if terms have mixed weights."""
        ws = self.weighted_degrees(weights)
        return ws.pop() if len(ws) == 1 else None

    def leading_exp(self) -> Exp:
        return d_leading(self.terms)

    def leading_coeff(self):
        return self.terms[self.leading_exp()]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: grevlex_key(kv[0]), reverse=True)

    def used_vars(self) -> set[str]:
        return {v for i, v in enumerate(self.vars) if any(e[i] for e in self.terms)}

    # -- variable handling ---------------------------------------------------

    def extend(self, vars: Iterable[str]) -> "MultiPoly":
        """Re-express in ``vars``, which must contain every used variable."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        pos = {v: i for i, v in enumerate(vars)}
        idx = []
        for i, v in enumerate(self.vars):
            if v in pos:
                idx.append(pos[v])
            elif any(e[i] for e in self.terms):
                raise ValueError(f"variable {v} is used but absent from {vars}")
            else:
                idx.append(None)
        out = {}
        n = len(vars)
        for e, c in self.terms.items():
            new = [0] * n
            for i, x in enumerate(e):
                if x:
                    new[idx[i]] = x
            out[tuple(new)] = c
        return MultiPoly._raw(vars, out)

    def _align(self, other: "MultiPoly"):
        if self.vars == other.vars:
            return self, other
        union = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return self.extend(union), other.extend(union)

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(self.vars, other)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        a, b = self._align(self._coerce(other))
        return MultiPoly._raw(a.vars, d_add(a.terms, b.terms))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._align(self._coerce(other))
        return MultiPoly._raw(a.vars, d_add(a.terms, b.terms, -ONE))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return MultiPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = qq(other)
            if not c:
                return MultiPoly._raw(self.vars, {})
            return MultiPoly._raw(self.vars, {e: v * c for e, v in self.terms.items()})
        a, b = self._align(other)
        return MultiPoly._raw(a.vars, d_mul(a.terms, b.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = qq(other)
        return self * (ONE / c)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.one(self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        used = sorted(self.used_vars())
        p = self.extend(used) if used else MultiPoly._raw((), {(): c for c in self.terms.values()})
        return hash((p.vars, frozenset(p.terms.items())))

    # -- calculus and substitution --------------------------------------------

    def diff(self, name: str) -> "MultiPoly":
        if name not in self.vars:
            return MultiPoly._raw(self.vars, {})
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
                out[ne] = c * e[i]
        return MultiPoly._raw(self.vars, out)

    def substitute(self, assignment: Mapping[str, "MultiPoly"]) -> "MultiPoly":
        """Compose: replace each variable named in ``assignment`` by its image.

        Variables without an image are kept as they are.
        """
        images = []
        target = None
        for v in self.vars:
            img = assignment.get(v)
            if img is None:
                img = MultiPoly.var((v,), v)
            elif not isinstance(img, MultiPoly):
                img = MultiPoly.constant((), img)
            images.append(img)
        names: list[str] = []
        for img in images:
            for v in img.vars:
                if v not in names:
                    names.append(v)
        target = tuple(names)
        images = [img.extend(target) for img in images]
        cache: list[dict[int, dict]] = [{0: {(0,) * len(target): ONE}, 1: img.terms} for img in images]

        def power(i: int, k: int) -> dict:
            got = cache[i].get(k)
            if got is None:
                got = d_mul(power(i, k - 1), cache[i][1])
                cache[i][k] = got
            return got

        out: dict = {}
        for e, c in self.terms.items():
            term = {(0,) * len(target): c}
            for i, k in enumerate(e):
                if k:
                    term = d_mul(term, power(i, k))
            out = d_add(out, term)
        return MultiPoly._raw(target, out)

    def permute(self, perm: Iterable[int], names: Iterable[str] | None = None) -> "MultiPoly":
        """Act by a permutation of the variables ``names`` (default: all).

        ``perm[i] = j`` sends the i-th listed variable to the j-th one, so
        the exponent of variable i moves to variable perm[i].
        """
        names = tuple(names) if names is not None else self.vars
        perm = tuple(perm)
        idx = [self.vars.index(v) for v in names]
        out = {}
        for e, c in self.terms.items():
            new = list(e)
            for i, src in enumerate(idx):
                new[idx[perm[i]]] = e[src]
            out[tuple(new)] = c
        return MultiPoly._raw(self.vars, out)

    def map_coeffs(self, fn) -> "MultiPoly":
        return MultiPoly(self.vars, {e: fn(c) for e, c in self.terms.items()})

    # -- text and JSON forms --------------------------------------------------

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{to_text(mag)}*{mono}"
            else:
                body = to_text(mag)
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MultiPoly({self.vars}, {self.to_text()!r})"

    @classmethod
    def parse(cls, text: str, vars: Iterable[str] | None = None) -> "MultiPoly":
        """Parse the canonical text form (``^`` or ``**`` for powers)."""
        import sympy

        expr = sympy.sympify(text.replace("^", "**"))
        if vars is None:
            vars = sorted((str(s) for s in expr.free_symbols), key=_natural_key)
        vars = tuple(vars)
        if not vars:
            r = sympy.Rational(expr)
            return cls.constant((), QQ(int(r.p), int(r.q)))
        poly = sympy.Poly(expr, *sympy.symbols(vars), domain="QQ")
        terms = {}
        for monom, coeff in poly.terms():
            r = sympy.Rational(coeff)
            terms[tuple(monom)] = QQ(int(r.p), int(r.q))
        return cls(vars, terms)


def _natural_key(name: str):
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", name)]


def variables(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


def monomials_up_to(nvars: int, max_degree: int):
    """All exponent tuples of total degree <= max_degree, by degree."""
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            yield tuple(e)


class DivisionError(ArithmeticError):
    pass


def exact_divide(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Quotient ``p / q``; raises ``DivisionError`` unless q divides p exactly."""
    p, q = p._align(q)
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lq = q.leading_exp()
    cq = q.terms[lq]
    rem = dict(p.terms)
    quot: dict = {}
    while rem:
        lp = d_leading(rem)
        if not exp_divides(lq, lp):
            raise DivisionError("divisor does not divide the dividend")
        e = exp_sub(lp, lq)
        c = rem[lp] / cq
        quot[e] = c
        rem = d_add(rem, d_mul_term(q.terms, e, c), -ONE)
    return MultiPoly._raw(p.vars, quot)
