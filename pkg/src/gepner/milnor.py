"""Milnor algebras, Grothendieck residues and their unfolding families.

``MilnorAlgebra`` is the quotient of the polynomial ring by the Jacobian
ideal of a fixed polynomial, with the grevlex standard monomials as basis.
``FamilyMilnorAlgebra`` does the same for an unfolding
``f + sum_a t_a phi_a`` over the parameter series ring truncated at a
total t-degree; the basis is frozen at t = 0.

Family residue pairings are computed from the Bezoutian of the partial
derivatives (its class in A (x) A is the dual-basis tensor of the residue
pairing). ``transformation_law_residue`` is the independent route through
the residue transformation law and serves as a cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .exactalg import smatrix as sm
from .exactalg.linalg import QMatrix, linear_solve, NoSolution
from .exactalg.poly import MultiPoly, d_add, d_mul, exp_divides, grevlex_key
from .exactalg.rational import ONE, QQ, ZERO
from .exactalg.series import TruncSeries
from .groebner import GroebnerBasis, groebner

__all__ = [
    "FamilyMilnorAlgebra",
    "MilnorAlgebra",
    "NonIsolatedSingularity",
    "ResidueFunctional",
    "groebner",
    "hessian",
    "milnor_algebra",
    "quasi_homogeneous_weights",
    "residue_functional",
    "transformation_law_residue",
]


class NonIsolatedSingularity(ValueError):
    def __init__(self, variable: str):
        super().__init__(f"Jacobian ideal is not zero-dimensional: no pure power of {variable}")
        self.variable = variable


class DegenerateResidue(ValueError):
    pass


def hessian(f: MultiPoly) -> MultiPoly:
    """Determinant of the matrix of second partial derivatives."""
    grads = [f.diff(v) for v in f.vars]
    H = [[g.diff(v) for v in f.vars] for g in grads]
    return _poly_det(H, f.vars)


def _poly_det(M, vars) -> MultiPoly:
    n = len(M)
    if n == 0:
        return MultiPoly.one(vars)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    out = MultiPoly.zero(vars)
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = M[0][j] * _poly_det(minor, vars)
        out = out + term if j % 2 == 0 else out - term
    return out


def quasi_homogeneous_weights(f: MultiPoly) -> tuple | None:
    """Rational weights w with f weighted-homogeneous of weight 1, if unique."""
    exps = list(f.terms)
    A = QMatrix([list(e) for e in exps], f.nvars)
    try:
        sol = linear_solve(A, QMatrix.column([1] * len(exps)))
    except NoSolution:
        return None
    if sol.kernel:
        return None
    return tuple(sol.particular.col(0))


class MilnorAlgebra:
    """Jacobian algebra of ``f`` with its standard-monomial basis."""

    def __init__(self, f: MultiPoly):
        self.f = f
        self.vars = f.vars
        self.partials = [f.diff(v) for v in f.vars]
        if any(p.is_zero() for p in self.partials):
            raise NonIsolatedSingularity(self.vars[[p.is_zero() for p in self.partials].index(True)])
        self.gb: GroebnerBasis = groebner(self.partials, track=True)
        self.basis: list[tuple] = self._standard_monomials()
        self.index = {e: i for i, e in enumerate(self.basis)}
        self._div_cache: dict = {}

    def _standard_monomials(self) -> list[tuple]:
        leads = self.gb.leading_exps
        n = len(self.vars)
        bounds = []
        for i in range(n):
            pure = [e[i] for e in leads if all(x == 0 for j, x in enumerate(e) if j != i) and e[i] > 0]
            if not pure:
                raise NonIsolatedSingularity(self.vars[i])
            bounds.append(min(pure))
        out = []
        for e in itertools.product(*(range(b) for b in bounds)):
            if not any(exp_divides(L, e) for L in leads):
                out.append(tuple(e))
        out.sort(key=grevlex_key)
        return out

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def basis_polys(self) -> list[MultiPoly]:
        return [MultiPoly.monomial(self.vars, e) for e in self.basis]

    def basis_text(self) -> list[str]:
        return [p.to_text() for p in self.basis_polys()]

    def coords(self, remainder: MultiPoly) -> list:
        v = [ZERO] * self.dimension
        for e, c in remainder.terms.items():
            v[self.index[e]] = c
        return v

    def normal_form(self, h: MultiPoly) -> list:
        """Coordinates of the class of h in the standard-monomial basis."""
        return self.coords(self.gb.reduce(h.extend(self.vars)))

    def divide_partials(self, h: MultiPoly):
        """``h = sum_i q_i * df/dz_i + r`` with r a combination of basis monomials."""
        return self.gb.divide(h.extend(self.vars))

    def _divide_monomial(self, e: tuple):
        got = self._div_cache.get(e)
        if got is None:
            got = self.divide_partials(MultiPoly.monomial(self.vars, e))
            self._div_cache[e] = got
        return got

    @cached_property
    def multiplication_tensor(self) -> list[list[list]]:
        """``T[a][b][c]`` = coefficient of e_c in e_a * e_b."""
        polys = self.basis_polys()
        return [[self.normal_form(pa * pb) for pb in polys] for pa in polys]

    def mult_matrix(self, v: Sequence) -> QMatrix:
        """Matrix (columns = images of basis vectors) of multiplication by v."""
        T = self.multiplication_tensor
        mu = self.dimension
        cols = []
        for b in range(mu):
            col = [ZERO] * mu
            for a in range(mu):
                if v[a]:
                    for c in range(mu):
                        col[c] += v[a] * T[a][b][c]
            cols.append(col)
        return QMatrix(cols).transpose()

    @cached_property
    def weights(self):
        return quasi_homogeneous_weights(self.f)

    def basis_weights(self) -> list:
        w = self.weights
        if w is None:
            raise ValueError("polynomial is not quasi-homogeneous")
        return [sum(QQ(a) * b for a, b in zip(w, e)) for e in self.basis]


def milnor_algebra(f: MultiPoly) -> MilnorAlgebra:
    return MilnorAlgebra(f)


@dataclass
class ResidueFunctional:
    """Linear functional on the Milnor algebra normalised by lambda(hess) = mu."""

    algebra: MilnorAlgebra
    values: list  # lambda(e_b) for each basis monomial

    def __call__(self, v: Sequence):
        return sum((a * b for a, b in zip(v, self.values)), ZERO)

    def of_poly(self, h: MultiPoly):
        return self(self.algebra.normal_form(h))

    @cached_property
    def gram(self) -> QMatrix:
        T = self.algebra.multiplication_tensor
        mu = self.algebra.dimension
        return QMatrix([[self(T[a][b]) for b in range(mu)] for a in range(mu)], mu)


def residue_functional(A: MilnorAlgebra) -> ResidueFunctional:
    """Residue functional of a quasi-homogeneous isolated singularity.

    It vanishes below the socle weight; the socle value is fixed by
    lambda(hess f) = mu.
    """
    if A.weights is None:
        raise DegenerateResidue("the graded residue needs a quasi-homogeneous polynomial")
    ws = A.basis_weights()
    top = max(ws)
    socle = [i for i, w in enumerate(ws) if w == top]
    if len(socle) != 1:
        raise DegenerateResidue("socle of the graded Milnor algebra is not one-dimensional")
    s = socle[0]
    h = A.normal_form(hessian(A.f))
    if any(c for i, c in enumerate(h) if i != s) or not h[s]:
        raise DegenerateResidue("Hessian class is not a nonzero socle multiple")
    values = [ZERO] * A.dimension
    values[s] = QQ(A.dimension) / h[s]
    lam = ResidueFunctional(A, values)
    if not lam.gram.det():
        raise DegenerateResidue("Gram matrix of the residue pairing is singular")
    return lam


# ---------------------------------------------------------------------------
# families


SVec = list[TruncSeries]


class FamilyMilnorAlgebra:
    """Milnor algebra of ``f + sum_a t_a * deformations[a]`` to t-order ``order``.

    Elements are coordinate vectors (lists of ``TruncSeries``) in the basis
    of standard monomials of ``f``.
    """

    def __init__(self, f: MultiPoly, deformations: Sequence[MultiPoly], order: int, params=None):
        self.base = MilnorAlgebra(f)
        self.f = f
        self.vars = f.vars
        self.deformations = [p.extend(self.vars) for p in deformations]
        self.nparams = len(self.deformations)
        self.params = tuple(params) if params is not None else tuple(f"t{i}" for i in range(self.nparams))
        if len(self.params) != self.nparams:
            raise ValueError("one parameter name per deformation")
        if set(self.params) & set(self.vars):
            raise ValueError("parameter names clash with variables")
        self.order = order
        self._dphi = [[p.diff(v) for v in self.vars] for p in self.deformations]
        self._mono_cache: dict = {}

    @property
    def dimension(self) -> int:
        return self.base.dimension

    @property
    def basis(self):
        return self.base.basis

    # -- normal forms -----------------------------------------------------------

    def _zero_vec(self, order) -> SVec:
        return [TruncSeries.zero(self.nparams, order) for _ in range(self.dimension)]

    def nf_monomial(self, e: tuple, order: int | None = None) -> SVec:
        order = self.order if order is None else order
        key = (e, order)
        got = self._mono_cache.get(key)
        if got is not None:
            return got
        q, r = self.base._divide_monomial(e)
        out = [TruncSeries.constant(self.nparams, c, order) for c in self.base.coords(r)]
        if order > 0 and any(not qi.is_zero() for qi in q):
            for a in range(self.nparams):
                h = MultiPoly.zero(self.vars)
                for qi, dphi in zip(q, self._dphi[a]):
                    if not qi.is_zero() and not dphi.is_zero():
                        h = h + qi * dphi
                if h.is_zero():
                    continue
                sub = self.nf_poly(h, order - 1)
                shift = tuple(int(j == a) for j in range(self.nparams))
                out = [o - s.shift(shift) for o, s in zip(out, sub)]
        self._mono_cache[key] = out
        return out

    def nf_poly(self, h: MultiPoly, order: int | None = None) -> SVec:
        """Class of a t-independent polynomial in z."""
        order = self.order if order is None else order
        out = self._zero_vec(order)
        for e, c in h.extend(self.vars).terms.items():
            v = self.nf_monomial(e, order)
            out = [o + x.scale(c) for o, x in zip(out, v)]
        return out

    def nf_family(self, h: dict, order: int | None = None) -> SVec:
        """Class of ``sum_gamma t^gamma * h[gamma]`` (h maps t-exponents to
        polynomials in z)."""
        order = self.order if order is None else order
        out = self._zero_vec(order)
        for gamma, poly in h.items():
            k = sum(gamma)
            if k > order or poly.is_zero():
                continue
            sub = self.nf_poly(poly, order - k)
            out = [o + s.shift(gamma) for o, s in zip(out, sub)]
        return out

    def nf_series_poly(self, coeffs: dict) -> SVec:
        """Class of ``sum_e z^e * coeffs[e]`` with TruncSeries coefficients."""
        order = self.order
        for s in coeffs.values():
            if s.order is not None:
                order = min(order, s.order)
        out = self._zero_vec(order)
        for e, s in coeffs.items():
            v = self.nf_monomial(e, order)
            out = [o + x * s for o, x in zip(out, v)]
        return out

    def split_poly(self, p: MultiPoly) -> dict:
        """Split a polynomial in (z, t) into {t-exponent: polynomial in z}."""
        names = self.vars + self.params
        p = p.extend(names)
        n = len(self.vars)
        out: dict = {}
        for e, c in p.terms.items():
            z, t = e[:n], e[n:]
            out.setdefault(t, {})[z] = c
        return {t: MultiPoly(self.vars, d) for t, d in out.items()}

    # -- algebra structure ------------------------------------------------------

    @cached_property
    def _products(self) -> list[list[SVec]]:
        polys = self.base.basis_polys()
        mu = self.dimension
        out = [[None] * mu for _ in range(mu)]
        for a in range(mu):
            for b in range(a, mu):
                v = self.nf_poly(polys[a] * polys[b])
                out[a][b] = out[b][a] = v
        return out

    def product_tensor(self) -> list[list[SVec]]:
        """``P[a][b]`` = class of e_a * e_b."""
        return self._products

    def multiply(self, u: SVec, v: SVec) -> SVec:
        mu = self.dimension
        P = self._products
        order = min(x.order for x in list(u) + list(v) if x.order is not None) if any(
            x.order is not None for x in list(u) + list(v)
        ) else self.order
        out = self._zero_vec(order)
        for a in range(mu):
            if u[a].is_zero():
                continue
            for b in range(mu):
                if v[b].is_zero():
                    continue
                coef = u[a] * v[b]
                out = [o + coef * x for o, x in zip(out, P[a][b])]
        return out

    def mult_matrix(self, v: SVec) -> sm.SMat:
        """Multiplication by v as a matrix; column b is v * e_b."""
        mu = self.dimension
        P = self._products
        M = sm.zeros(mu, mu, self.nparams, self.order)
        for a in range(mu):
            if v[a].is_zero():
                continue
            for b in range(mu):
                for c in range(mu):
                    x = P[a][b][c]
                    if not x.is_zero():
                        M[c][b] = M[c][b] + v[a] * x
        return M

    @cached_property
    def deformation_classes(self) -> list[SVec]:
        return [self.nf_poly(p) for p in self.deformations]

    def unit(self) -> SVec:
        return self.nf_poly(MultiPoly.one(self.vars))

    def unfolding(self) -> MultiPoly:
        names = self.vars + self.params
        out = self.f.extend(names)
        for t, p in zip(self.params, self.deformations):
            out = out + MultiPoly.var(names, t) * p.extend(names)
        return out

    def family_partials(self) -> list[MultiPoly]:
        F = self.unfolding()
        return [F.diff(v) for v in self.vars]

    # -- residue pairing ----------------------------------------------------------

    @cached_property
    def bezoutian_matrix(self) -> sm.SMat:
        """``B[i][j]``: coefficient of e_i(z) e_j(w) in the Bezoutian class."""
        n = len(self.vars)
        ws = tuple(f"_w{i}" for i in range(n))
        names = self.vars + ws + self.params
        g = [p.extend(names) for p in self.family_partials()]
        npar = self.nparams
        entries = [[_divided_difference(gi, j, n, names) for j in range(n)] for gi in g]
        delta = _poly_det(entries, names)
        # group terms by (z-exponent, t-exponent) summing the w-part
        groups: dict = {}
        for e, c in delta.terms.items():
            z, w, t = e[:n], e[n : 2 * n], e[2 * n :]
            groups.setdefault((z, t), {})[w] = c
        mu = self.dimension
        order = self.order
        B = sm.zeros(mu, mu, npar, order)
        for (z, t), wpart in groups.items():
            k = sum(t)
            if k > order:
                continue
            o = order - k
            left = self.nf_monomial(z, o)
            right = self._zero_vec(o)
            for w, c in wpart.items():
                right = [r + x.scale(c) for r, x in zip(right, self.nf_monomial(w, o))]
            for i in range(mu):
                if left[i].is_zero():
                    continue
                for j in range(mu):
                    if right[j].is_zero():
                        continue
                    B[i][j] = B[i][j] + (left[i] * right[j]).shift(t)
        return B

    @cached_property
    def gram(self) -> sm.SMat:
        """``G[a][b]`` = Res(e_a e_b dz / (d_1 f~ ... d_n f~))."""
        if self.order == 0:
            B0 = sm.constant_part(self.bezoutian_matrix)
            return sm.from_qmatrix(B0.inverse(), self.nparams, 0)
        return sm.inverse(self.bezoutian_matrix)

    @cached_property
    def residue_values(self) -> SVec:
        """lambda_t(e_b) for each basis element (column of the unit)."""
        unit = self.unit()
        G = self.gram
        return [
            _dot([G[b][c] for c in range(self.dimension)], unit) for b in range(self.dimension)
        ]

    def residue(self, v: SVec) -> TruncSeries:
        return _dot(v, self.residue_values)

    def pairing(self, u: SVec, v: SVec) -> TruncSeries:
        return self.residue(self.multiply(u, v))

    def at_origin(self) -> MilnorAlgebra:
        return self.base


def _dot(u: SVec, v: SVec) -> TruncSeries:
    acc = None
    for a, b in zip(u, v):
        if a.is_zero() or b.is_zero():
            term = TruncSeries.zero(a.nvars, a.order if b.order is None else (b.order if a.order is None else min(a.order, b.order)))
        else:
            term = a * b
        acc = term if acc is None else acc + term
    return acc


def _divided_difference(g: MultiPoly, j: int, n: int, names) -> MultiPoly:
    """(g(z_1..z_j, w_{j+1}..) - g(z_1..z_{j-1}, w_j..)) / (z_j - w_j), variable j
    0-based; g is given in the z variables (positions 0..n-1)."""
    out: dict = {}
    width = len(names)
    for e, c in g.terms.items():
        k = e[j]
        if k == 0:
            continue
        base = [0] * width
        for l in range(n):
            if l < j:
                base[l] = e[l]
            elif l > j:
                base[n + l] = e[l]
        for l in range(2 * n, width):
            base[l] = e[l]
        for p in range(k):
            q = k - 1 - p
            m = list(base)
            m[j] += p
            m[n + j] += q
            m = tuple(m)
            out[m] = out.get(m, ZERO) + c
    return MultiPoly(names, out)


def transformation_law_residue(
    family: FamilyMilnorAlgebra, h: MultiPoly, exponents: Sequence[int] | None = None
) -> TruncSeries:
    """Res(h dz / (d_1 f~ ... d_n f~)) via the transformation law.

    Writes ``z_i^{N_i} = sum_j a_ij d_j f~`` modulo t^(order+1) and reads
    the coefficient of z^(N-1) in ``h * det(a)``. Independent of the
    Bezoutian route; intended for small cross-checks.
    """
    n = len(family.vars)
    order = family.order
    npar = family.nparams
    if exponents is None:
        deg = max(family.f.degree(), 2)
        exponents = [deg * (order + 2) + h.degree()] * n
    rows = []
    for i in range(n):
        e = tuple(exponents[i] if j == i else 0 for j in range(n))
        cof, rem = _family_divide(family, {(0,) * npar: MultiPoly.monomial(family.vars, e)}, order)
        if any(not p.is_zero() for p in rem.values()):
            raise ValueError("pure powers not yet in the family ideal; raise the exponents")
        rows.append(cof)
    # det of the n x n matrix whose entries are {t-exp: poly}
    det = _family_det(rows, family.vars, npar, order)
    target = tuple(N - 1 for N in exponents)
    terms = {}
    for gamma, poly in det.items():
        c = (poly * h).coeff(target)
        if c:
            terms[gamma] = c
    return TruncSeries(npar, order, terms)


def _family_divide(family: FamilyMilnorAlgebra, h: dict, order: int):
    """Division with cofactors in the family; returns (cofactors, remainder)
    where cofactors[j] and the remainder map t-exponents to polynomials."""
    npar = family.nparams
    n = len(family.vars)
    pending = {g: p for g, p in h.items()}
    cof = [dict() for _ in range(n)]
    rem: dict = {}
    for deg in range(order + 1):
        layer = sorted(g for g in pending if sum(g) == deg)
        for gamma in layer:
            poly = pending.pop(gamma)
            if poly.is_zero():
                continue
            q, r = family.base.divide_partials(poly)
            if not r.is_zero():
                rem[gamma] = rem.get(gamma, MultiPoly.zero(family.vars)) + r
            for j in range(n):
                if not q[j].is_zero():
                    cof[j][gamma] = cof[j].get(gamma, MultiPoly.zero(family.vars)) + q[j]
            if deg < order:
                for a in range(npar):
                    corr = MultiPoly.zero(family.vars)
                    for qi, dphi in zip(q, family._dphi[a]):
                        if not qi.is_zero() and not dphi.is_zero():
                            corr = corr + qi * dphi
                    if corr.is_zero():
                        continue
                    g2 = tuple(x + int(i == a) for i, x in enumerate(gamma))
                    pending[g2] = pending.get(g2, MultiPoly.zero(family.vars)) - corr
    return cof, rem


def _family_mul(a: dict, b: dict, vars, order) -> dict:
    out: dict = {}
    for g1, p1 in a.items():
        for g2, p2 in b.items():
            g = tuple(x + y for x, y in zip(g1, g2))
            if sum(g) > order:
                continue
            out[g] = out.get(g, MultiPoly.zero(vars)) + p1 * p2
    return {g: p for g, p in out.items() if not p.is_zero()}


def _family_det(M, vars, npar, order) -> dict:
    n = len(M)
    if n == 1:
        return M[0][0]
    out: dict = {}
    for j in range(n):
        if not M[0][j]:
            continue
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = _family_mul(M[0][j], _family_det(minor, vars, npar, order), vars, order)
        sign = 1 if j % 2 == 0 else -1
        for g, p in term.items():
            out[g] = out.get(g, MultiPoly.zero(vars)) + p * sign
    return {g: p for g, p in out.items() if not p.is_zero()}
