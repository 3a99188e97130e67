"""Truncated multivariate power series in deformation parameters.

A ``TruncSeries`` stores the coefficients of monomials of total degree at
most ``order`` in ``nvars`` parameters. ``order=None`` marks an exact
polynomial (no truncation). Binary operations take the smaller of the two
orders. Only ``integrate`` and ``shift`` raise a finite order, because
their results are determined one (or |exp|) degrees further.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .poly import Exp, MultiPoly, monomials_up_to
from .rational import ONE, QQ, ZERO, qq, to_text


class PrecisionError(ValueError):
    pass


def min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class TruncSeries:
    __slots__ = ("nvars", "order", "terms")

    def __init__(self, nvars: int, order: int | None, terms: Mapping[Exp, object] | None = None):
        if order is not None and order < 0:
            raise PrecisionError("negative truncation order")
        self.nvars = nvars
        self.order = order
        out = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars:
                raise ValueError("exponent length mismatch")
            if order is not None and sum(e) > order:
                continue
            c = qq(c)
            if c:
                out[e] = out.get(e, ZERO) + c
        self.terms = {e: c for e, c in out.items() if c}

    @classmethod
    def _raw(cls, nvars, order, terms) -> "TruncSeries":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.order = order
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, nvars, order=None) -> "TruncSeries":
        return cls._raw(nvars, order, {})

    @classmethod
    def constant(cls, nvars, c, order=None) -> "TruncSeries":
        c = qq(c)
        return cls._raw(nvars, order, {(0,) * nvars: c} if c else {})

    @classmethod
    def param(cls, nvars, i, order=None) -> "TruncSeries":
        e = tuple(int(j == i) for j in range(nvars))
        return cls(nvars, order, {e: 1})

    @classmethod
    def from_poly(cls, p: MultiPoly, order=None) -> "TruncSeries":
        return cls(p.nvars, order, p.terms)

    def to_poly(self, names) -> MultiPoly:
        return MultiPoly(names, self.terms)

    # -- queries ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, ZERO)

    def valuation(self):
        return min((sum(e) for e in self.terms), default=None)

    def coeff(self, exp: Exp):
        return self.terms.get(tuple(exp), ZERO)

    def homogeneous_part(self, degree: int) -> dict:
        return {e: c for e, c in self.terms.items() if sum(e) == degree}

    def truncate(self, order: int | None) -> "TruncSeries":
        if order is None:
            if self.order is not None:
                raise PrecisionError("cannot raise a truncated series to exact")
            return self
        if self.order is not None and order > self.order:
            raise PrecisionError(f"cannot raise order {self.order} to {order}")
        return TruncSeries._raw(
            self.nvars, order, {e: c for e, c in self.terms.items() if sum(e) <= order}
        )

    def agrees_with(self, other: "TruncSeries", order: int | None = None) -> bool:
        """Equality of the coefficients up to ``order`` (default: common order)."""
        o = min_order(self.order, other.order)
        if order is not None:
            o = order if o is None else min(o, order)
        for e in set(self.terms) | set(other.terms):
            if o is not None and sum(e) > o:
                continue
            if self.terms.get(e, ZERO) != other.terms.get(e, ZERO):
                return False
        return True

    def first_difference(self, other: "TruncSeries", order=None):
        o = min_order(self.order, other.order)
        if order is not None:
            o = order if o is None else min(o, order)
        keys = sorted(set(self.terms) | set(other.terms), key=lambda e: (sum(e), e))
        for e in keys:
            if o is not None and sum(e) > o:
                continue
            a, b = self.terms.get(e, ZERO), other.terms.get(e, ZERO)
            if a != b:
                return e, a, b
        return None

    # -- arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            if other.nvars != self.nvars:
                raise ValueError("parameter count mismatch")
            return other
        return TruncSeries.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        order = min_order(self.order, other.order)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, ZERO) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        if order is not None:
            out = {e: c for e, c in out.items() if sum(e) <= order}
        return TruncSeries._raw(self.nvars, order, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(self.nvars, self.order, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "TruncSeries":
        c = qq(c)
        if not c:
            return TruncSeries._raw(self.nvars, self.order, {})
        return TruncSeries._raw(self.nvars, self.order, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        if other.nvars != self.nvars:
            raise ValueError("parameter count mismatch")
        order = min_order(self.order, other.order)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        if order is None:
            for e1, c1 in a.items():
                for e2, c2 in b.items():
                    e = tuple(x + y for x, y in zip(e1, e2))
                    out[e] = out.get(e, ZERO) + c1 * c2
        else:
            bd = [(e, c, sum(e)) for e, c in b.items()]
            for e1, c1 in a.items():
                room = order - sum(e1)
                if room < 0:
                    continue
                for e2, c2, d2 in bd:
                    if d2 <= room:
                        e = tuple(x + y for x, y in zip(e1, e2))
                        out[e] = out.get(e, ZERO) + c1 * c2
        return TruncSeries._raw(self.nvars, order, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            other = self._coerce(other)
        return self.nvars == other.nvars and self.order == other.order and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, self.order, frozenset(self.terms.items())))

    def __pow__(self, k: int):
        out = TruncSeries.constant(self.nvars, 1, self.order)
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "TruncSeries":
        """Multiplicative inverse; requires a nonzero constant term."""
        c0 = self.constant_term()
        if not c0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        if self.order is None:
            raise PrecisionError("inverse of an exact polynomial needs an explicit order")
        inv0 = ONE / c0
        rest = (self - c0).scale(-inv0)
        out = TruncSeries.constant(self.nvars, inv0, self.order)
        power = TruncSeries.constant(self.nvars, 1, self.order)
        for _ in range(self.order):
            power = power * rest
            if power.is_zero():
                break
            out = out + power.scale(inv0)
        return out

    # -- calculus -----------------------------------------------------------

    def deriv(self, i: int) -> "TruncSeries":
        order = None if self.order is None else self.order - 1
        if order is not None and order < 0:
            raise PrecisionError("derivative of an order-0 series carries no information")
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                out[e[:i] + (e[i] - 1,) + e[i + 1 :]] = c * e[i]
        return TruncSeries._raw(self.nvars, order, out)

    def euler_deriv(self, i: int) -> "TruncSeries":
        """``t_i * d/dt_i``; keeps the order."""
        return TruncSeries._raw(
            self.nvars, self.order, {e: c * e[i] for e, c in self.terms.items() if e[i]}
        )

    def integrate(self, i: int) -> "TruncSeries":
        """Antiderivative in ``t_i`` with zero constant; exact precision bookkeeping.

        Integration is the one place the order legitimately grows by one.
        """
        order = None if self.order is None else self.order + 1
        out = {}
        for e, c in self.terms.items():
            out[e[:i] + (e[i] + 1,) + e[i + 1 :]] = c / (e[i] + 1)
        return TruncSeries._raw(self.nvars, order, out)

    def shift(self, exp: Exp) -> "TruncSeries":
        """Multiply by the monomial ``t^exp``; valid to ``order + |exp|``."""
        k = sum(exp)
        order = None if self.order is None else self.order + k
        return TruncSeries._raw(
            self.nvars, order, {tuple(x + y for x, y in zip(e, exp)): c for e, c in self.terms.items()}
        )

    def compose(self, images: list["TruncSeries"]) -> "TruncSeries":
        """Substitute ``t_i -> images[i]``; images must have zero constant term
        unless this series is exact."""
        if len(images) != self.nvars:
            raise ValueError("need one image per parameter")
        m = images[0].nvars if images else 0
        order = self.order
        for img in images:
            order = min_order(order, img.order)
            if self.order is not None and img.constant_term():
                raise PrecisionError("composition with a non-vanishing constant term")
        if order is not None:
            images = [img.truncate(order) for img in images]
        one = TruncSeries.constant(m, 1, order)
        cache: dict[tuple[int, int], TruncSeries] = {}

        def power(i, k):
            if k == 0:
                return one
            key = (i, k)
            if key not in cache:
                cache[key] = power(i, k - 1) * images[i]
            return cache[key]

        out = TruncSeries.zero(m, order)
        for e, c in sorted(self.terms.items()):
            term = one.scale(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
                    if term.is_zero():
                        break
            out = out + term
        return out

    # -- formatting -----------------------------------------------------------

    def to_text(self, names: Iterable[str] | None = None) -> str:
        names = tuple(names) if names is not None else tuple(f"t{i}" for i in range(self.nvars))
        body = MultiPoly(names, self.terms).to_text()
        if self.order is not None:
            body += f" + O({self.order + 1})"
        return body

    def __repr__(self):
        return f"TruncSeries({self.to_text()})"


def series_vector_zero(length: int, nvars: int, order) -> list[TruncSeries]:
    return [TruncSeries.zero(nvars, order) for _ in range(length)]


def all_monomials(nvars: int, order: int):
    return list(monomials_up_to(nvars, order))
