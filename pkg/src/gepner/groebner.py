"""Buchberger's algorithm in graded reverse lexicographic order.

Optionally tracks, for every basis element, its expression as a
combination of the input generators; the Milnor-algebra code needs these
cofactors to lift remainders to ideal memberships.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .exactalg.poly import (
    MultiPoly,
    d_add,
    d_leading,
    d_mul,
    d_mul_term,
    exp_divides,
    exp_lcm,
    exp_sub,
    grevlex_key,
)
from .exactalg.rational import ONE, ZERO


@dataclass
class _Elem:
    poly: dict
    lead: tuple
    cof: list | None


def _monic(poly: dict, cof):
    lead = d_leading(poly)
    inv = ONE / poly[lead]
    poly = {e: c * inv for e, c in poly.items()}
    if cof is not None:
        cof = [{e: c * inv for e, c in q.items()} for q in cof]
    return _Elem(poly, lead, cof)


def _heap_key(e):
    return (-sum(e), tuple(reversed(e)))


def reduce_full(poly: dict, basis: list[_Elem], nvars: int, track: bool = False):
    """Fully reduce ``poly`` by ``basis``.

    Returns ``(remainder, quotients)`` where quotients[j] multiplies
    basis[j] (only when ``track``).
    """
    rem: dict = {}
    p = dict(poly)
    quots = [dict() for _ in basis] if track else None
    # max-heap on grevlex order; each monomial is popped at most once because
    # reduction only introduces monomials below the current leading one
    heap = [(_heap_key(e), e) for e in p]
    heapq.heapify(heap)
    while heap:
        _, lead = heapq.heappop(heap)
        c = p.pop(lead, None)
        if c is None:
            continue
        for j, b in enumerate(basis):
            if exp_divides(b.lead, lead):
                shift = exp_sub(lead, b.lead)
                for e2, c2 in b.poly.items():
                    if e2 == b.lead:
                        continue
                    e = tuple(x + y for x, y in zip(e2, shift))
                    old = p.get(e)
                    v = (ZERO if old is None else old) - c * c2
                    if v:
                        if old is None:
                            heapq.heappush(heap, (_heap_key(e), e))
                        p[e] = v
                    elif old is not None:
                        del p[e]
                if track:
                    quots[j][shift] = quots[j].get(shift, ZERO) + c
                break
        else:
            rem[lead] = c
    return rem, quots


@dataclass
class GroebnerBasis:
    vars: tuple[str, ...]
    elements: list[_Elem]
    generators: list[MultiPoly] = field(default_factory=list)

    @property
    def polys(self) -> list[MultiPoly]:
        return [MultiPoly._raw(self.vars, dict(e.poly)) for e in self.elements]

    @property
    def leading_exps(self) -> list[tuple]:
        return [e.lead for e in self.elements]

    @property
    def tracked(self) -> bool:
        return bool(self.elements) and self.elements[0].cof is not None

    def is_unit_ideal(self) -> bool:
        return any(not any(e.lead) for e in self.elements)

    def reduce(self, p: MultiPoly) -> MultiPoly:
        rem, _ = reduce_full(p.extend(self.vars).terms, self.elements, len(self.vars))
        return MultiPoly._raw(self.vars, rem)

    def divide(self, p: MultiPoly):
        """``p = sum_i q_i * generators[i] + r``; returns ``(q, r)``.

        Requires cofactor tracking.
        """
        if not self.tracked:
            raise ValueError("basis was computed without cofactors")
        rem, quots = reduce_full(p.extend(self.vars).terms, self.elements, len(self.vars), track=True)
        ngen = len(self.generators)
        q = [dict() for _ in range(ngen)]
        for Qj, el in zip(quots, self.elements):
            if not Qj:
                continue
            for i in range(ngen):
                if el.cof[i]:
                    q[i] = d_add(q[i], d_mul(Qj, el.cof[i]))
        return [MultiPoly._raw(self.vars, qi) for qi in q], MultiPoly._raw(self.vars, rem)

    def contains(self, p: MultiPoly) -> bool:
        return self.reduce(p).is_zero()


def groebner(generators: list[MultiPoly], track: bool = False) -> GroebnerBasis:
    """Reduced Groebner basis (grevlex, declared variable order).

    Pairs are processed by the normal selection strategy: smallest lcm of
    leading monomials first, ties broken by pair index.
    """
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        raise ValueError("need at least one nonzero generator")
    names: list[str] = []
    for g in gens:
        for v in g.vars:
            if v not in names:
                names.append(v)
    vars = tuple(names)
    gens = [g.extend(vars) for g in gens]
    n = len(vars)
    ngen = len(gens)
    basis: list[_Elem] = []
    for i, g in enumerate(gens):
        cof = [({(0,) * n: ONE} if j == i else {}) for j in range(ngen)] if track else None
        basis.append(_monic(dict(g.terms), cof))

    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]

    def pair_key(p):
        i, j = p
        return (grevlex_key(exp_lcm(basis[i].lead, basis[j].lead)), p)

    while pairs:
        pairs.sort(key=pair_key)
        i, j = pairs.pop(0)
        bi, bj = basis[i], basis[j]
        lcm = exp_lcm(bi.lead, bj.lead)
        if all(a == 0 or b == 0 for a, b in zip(bi.lead, bj.lead)):
            continue  # coprime leading monomials
        ei, ej = exp_sub(lcm, bi.lead), exp_sub(lcm, bj.lead)
        s = d_add(d_mul_term(bi.poly, ei, ONE), d_mul_term(bj.poly, ej, ONE), -ONE)
        scof = None
        if track:
            scof = [
                d_add(d_mul_term(ci, ei, ONE), d_mul_term(cj, ej, ONE), -ONE)
                for ci, cj in zip(bi.cof, bj.cof)
            ]
        rem, quots = reduce_full(s, basis, n, track=track)
        if not rem:
            continue
        if track:
            for Qk, bk in zip(quots, basis):
                if Qk:
                    scof = [d_add(sc, d_mul(Qk, ck), -ONE) for sc, ck in zip(scof, bk.cof)]
        new = _monic(rem, scof)
        basis.append(new)
        k = len(basis) - 1
        pairs.extend((m, k) for m in range(k))

    # minimize
    keep = []
    for i, b in enumerate(basis):
        dominated = False
        for j, c in enumerate(basis):
            if j == i:
                continue
            if exp_divides(c.lead, b.lead) and (c.lead != b.lead or j < i):
                dominated = True
                break
        if not dominated:
            keep.append(b)
    # interreduce
    reduced = []
    for i, b in enumerate(keep):
        others = [c for j, c in enumerate(keep) if j != i]
        tail = {e: c for e, c in b.poly.items() if e != b.lead}
        rem, quots = reduce_full(tail, others, n, track=track)
        poly = dict(rem)
        poly[b.lead] = b.poly[b.lead]
        cof = b.cof
        if track:
            for Qk, ck in zip(quots, others):
                if Qk:
                    cof = [d_add(x, d_mul(Qk, y), -ONE) for x, y in zip(cof, ck.cof)]
        reduced.append(_monic(poly, cof))
    reduced.sort(key=lambda el: grevlex_key(el.lead))
    return GroebnerBasis(vars, reduced, gens)
