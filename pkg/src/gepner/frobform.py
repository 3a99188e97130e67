"""Formal Frobenius manifolds and pre-Saito structures at finite order.

All data are matrices or tensors of ``TruncSeries`` in the base
coordinates. Verifiers compare identities up to the order that the
inputs determine (derivatives lose one order each) capped at the
requested order, and report the first offending coefficient.

Index conventions:

* ``C[a][b][c]`` is the coefficient of d_c in d_a * d_b.
* Matrices act on column vectors; ``M[i][j]`` is row i, column j.
* ``nabla_a = d_a + A[a]`` on sections of the bundle.
* ``Gamma[c][a][b]`` is the Levi-Civita symbol of the metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .exactalg import smatrix as sm
from .exactalg.linalg import QMatrix
from .exactalg.rational import ONE, QQ, ZERO, to_text
from .exactalg.series import PrecisionError, TruncSeries, min_order

UNIT_NORMALIZED = "unit-normalized"
AS_WRITTEN = "as-written"
CONVENTIONS = (UNIT_NORMALIZED, AS_WRITTEN)


class NotPrimitive(ValueError):
    """The period map of the section is singular at the origin."""


class MalformedData(ValueError):
    pass


# ---------------------------------------------------------------------------
# data types


@dataclass
class FrobeniusData:
    names: tuple[str, ...]
    C: list  # C[a][b][c]
    g: sm.SMat
    unit: list
    euler: list
    charge: object = None  # D in L_E g = D g; None means "measure it"
    flat_coords: bool = False
    convention: str = UNIT_NORMALIZED

    @property
    def dim(self) -> int:
        return len(self.names)

    def __post_init__(self):
        m = len(self.names)
        if len(self.C) != m or any(len(r) != m or any(len(x) != m for x in r) for r in self.C):
            raise MalformedData("structure constants must be m x m x m")
        if len(self.g) != m or any(len(r) != m for r in self.g):
            raise MalformedData("metric must be m x m")
        if len(self.unit) != m or len(self.euler) != m:
            raise MalformedData("unit and Euler field need m components")

    def mult_matrix(self, a: int) -> sm.SMat:
        """Matrix of d_a * (column b holds the components of d_a * d_b)."""
        m = self.dim
        return [[self.C[a][b][c] for b in range(m)] for c in range(m)]

    def order(self):
        o = None
        for x in self._entries():
            o = min_order(o, x.order)
        return o

    def _entries(self):
        for r in self.C:
            for s in r:
                yield from s
        for r in self.g:
            yield from r
        yield from self.unit
        yield from self.euler


@dataclass
class PreSaitoData:
    names: tuple[str, ...]
    rank: int
    A: list  # connection matrices, one per coordinate
    Phi: list  # Higgs field matrices, one per coordinate
    R0: sm.SMat
    g: sm.SMat
    Rinf: sm.SMat | None = None

    @property
    def dim(self) -> int:
        return len(self.names)

    def __post_init__(self):
        m, r = len(self.names), self.rank
        for label, mats in (("A", self.A), ("Phi", self.Phi)):
            if len(mats) != m:
                raise MalformedData(f"{label} needs one matrix per coordinate")
            for M in mats:
                _check_square(M, r, label)
        _check_square(self.R0, r, "R0")
        _check_square(self.g, r, "g")
        if self.Rinf is not None:
            _check_square(self.Rinf, r, "Rinf")


def _check_square(M, r, label):
    if len(M) != r or any(len(row) != r for row in M):
        raise MalformedData(f"{label} must be {r} x {r}")


@dataclass
class PrimitiveFormSection:
    omega: list  # coefficients in the bundle frame


# ---------------------------------------------------------------------------
# certificates


@dataclass
class Check:
    name: str
    passed: bool
    witness: dict | None = None
    order: int | None = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {"axiom": self.name, "status": "pass" if self.passed else "fail"}
        if self.order is not None:
            out["order"] = self.order
        if self.witness:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Certificate:
    kind: str
    checks: list[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "info": self.info,
        }


def _cap(order, cap):
    return cap if order is None else (order if cap is None else min(order, cap))


def _first_term(s: TruncSeries, cap):
    o = _cap(s.order, cap)
    best = None
    for e, c in s.terms.items():
        if o is not None and sum(e) > o:
            continue
        key = (sum(e), e)
        if best is None or key < best[0]:
            best = (key, e, c)
    if best is None:
        return None
    return best[1], best[2]


class _Runner:
    """Collects checks; each check yields (index label, residual series)."""

    def __init__(self, cert: Certificate, cap, names):
        self.cert = cert
        self.cap = cap
        self.names = names

    def run(self, name: str, residuals: Callable):
        order = None
        try:
            for index, s in residuals():
                order = min_order(order, _cap(s.order, self.cap))
                hit = _first_term(s, self.cap)
                if hit is not None:
                    e, c = hit
                    witness = {
                        "index": list(index),
                        "monomial": _monomial_text(e, self.names),
                        "degree": sum(e),
                        "coefficient": to_text(c),
                    }
                    self.cert.checks.append(Check(name, False, witness, order))
                    return
        except PrecisionError:
            self.cert.checks.append(Check(name, True, None, None, "vacuous at this order"))
            return
        self.cert.checks.append(Check(name, True, None, order))

    def fail(self, name: str, witness: dict):
        self.cert.checks.append(Check(name, False, witness))

    def ok(self, name: str, note: str = ""):
        self.cert.checks.append(Check(name, True, None, None, note))


def _monomial_text(e, names) -> str:
    parts = []
    for v, k in zip(names, e):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts) or "1"


# ---------------------------------------------------------------------------
# differential geometry helpers


def _finite(M: sm.SMat, cap) -> sm.SMat:
    """Give exact entries a finite order so that inverses are defined."""
    o = None
    for r in M:
        for x in r:
            o = min_order(o, x.order)
    if o is None:
        if cap is None:
            raise PrecisionError("exact data needs an explicit order")
        return sm.truncate(M, cap)
    return M


def christoffel(g: sm.SMat, cap=None) -> list:
    """``Gamma[c][a][b]`` of the Levi-Civita connection of ``g``."""
    m = len(g)
    g = _finite(g, None if cap is None else cap + 1)
    ginv = sm.inverse(g)
    dg = [[[g[a][b].deriv(x) for b in range(m)] for a in range(m)] for x in range(m)]
    out = [[[None] * m for _ in range(m)] for _ in range(m)]
    half = QQ(1, 2)
    for a in range(m):
        for b in range(a, m):
            low = [(dg[a][b][d] + dg[b][a][d] - dg[d][a][b]).scale(half) for d in range(m)]
            for c in range(m):
                s = _dot([ginv[c][d] for d in range(m)], low)
                out[c][a][b] = out[c][b][a] = s
    return out


def riemann(Gamma: list) -> list:
    """``R[a][b][c][d] = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb``."""
    m = len(Gamma)
    R = [[[[None] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for d in range(m):
                    if d <= c:
                        continue
                    s = Gamma[a][d][b].deriv(c) - Gamma[a][c][b].deriv(d)
                    s = s + _dot([Gamma[a][c][e] for e in range(m)], [Gamma[e][d][b] for e in range(m)])
                    s = s - _dot([Gamma[a][d][e] for e in range(m)], [Gamma[e][c][b] for e in range(m)])
                    R[a][b][c][d] = s
    return R


def _dot(u, v) -> TruncSeries:
    acc = None
    for a, b in zip(u, v):
        if a.is_zero() or b.is_zero():
            term = TruncSeries.zero(a.nvars, min_order(a.order, b.order))
        else:
            term = a * b
        acc = term if acc is None else acc + term
    return acc


def _zero_like(x: TruncSeries) -> TruncSeries:
    return TruncSeries.zero(x.nvars, x.order)


def _delta(x: TruncSeries, i, j) -> TruncSeries:
    return TruncSeries.constant(x.nvars, 1 if i == j else 0, x.order)


def _three_tensor(F: FrobeniusData) -> list:
    """c[a][b][c] = g(d_a * d_b, d_c)."""
    m = F.dim
    return [
        [[_dot([F.C[a][b][e] for e in range(m)], [F.g[e][c] for e in range(m)]) for c in range(m)] for b in range(m)]
        for a in range(m)
    ]


def lie_metric(euler, g) -> sm.SMat:
    m = len(g)
    out = []
    for a in range(m):
        row = []
        for b in range(m):
            s = _dot(euler, [g[a][b].deriv(c) for c in range(m)])
            s = s + _dot([g[c][b] for c in range(m)], [euler[c].deriv(a) for c in range(m)])
            s = s + _dot([g[a][c] for c in range(m)], [euler[c].deriv(b) for c in range(m)])
            row.append(s)
        out.append(row)
    return out


def lie_product(euler, C) -> list:
    m = len(C)
    dE = [[euler[c].deriv(a) for a in range(m)] for c in range(m)]  # dE[c][a] = d_a E^c
    out = [[[None] * m for _ in range(m)] for _ in range(m)]
    for a in range(m):
        for b in range(m):
            for c in range(m):
                s = _dot(euler, [C[a][b][c].deriv(d) for d in range(m)])
                s = s + _dot([C[d][b][c] for d in range(m)], [dE[d][a] for d in range(m)])
                s = s + _dot([C[a][d][c] for d in range(m)], [dE[d][b] for d in range(m)])
                s = s - _dot([C[a][b][d] for d in range(m)], [dE[c][d] for d in range(m)])
                out[a][b][c] = s
    return out


def lie_bracket(X, Y) -> list:
    m = len(X)
    return [
        _dot(X, [Y[c].deriv(d) for d in range(m)]) - _dot(Y, [X[c].deriv(d) for d in range(m)])
        for c in range(m)
    ]


def measured_charge(F: FrobeniusData):
    """D read off from L_E g at the origin, or None when g(0) is zero."""
    try:
        L = lie_metric(F.euler, F.g)
    except PrecisionError:
        return None
    m = F.dim
    for a in range(m):
        for b in range(m):
            g0 = F.g[a][b].constant_term()
            if g0:
                return L[a][b].constant_term() / g0
    return None


# ---------------------------------------------------------------------------
# verifiers


def verify_frobenius_axioms(F: FrobeniusData, d: int | None = None, items=("i", "ii", "iii", "iv")) -> Certificate:
    """Check the Frobenius manifold axioms to order ``d``.

    (i) metric symmetric, nondegenerate, flat; (ii) product commutative,
    associative and potential; (iii) flat unit; (iv) Euler field.
    """
    cert = Certificate("frobenius", info={"convention": F.convention, "flat_coords": F.flat_coords})
    run = _Runner(cert, d, F.names)
    m = F.dim
    g, C = F.g, F.C

    Gamma = None

    def gamma():
        nonlocal Gamma
        if Gamma is None:
            Gamma = christoffel(g, d)
        return Gamma

    if "i" in items:
        run.run("metric symmetric", lambda: (((a, b), g[a][b] - g[b][a]) for a in range(m) for b in range(a + 1, m)))
        det0 = sm.constant_part(g).det()
        if det0:
            run.ok("metric nondegenerate")
        else:
            run.fail("metric nondegenerate", {"determinant_at_origin": "0"})
        if F.flat_coords:
            run.run(
                "metric flat",
                lambda: (((a, b, x), g[a][b].deriv(x)) for a in range(m) for b in range(m) for x in range(m)),
            )
        elif det0:

            def curvature():
                R = riemann(gamma())
                for a in range(m):
                    for b in range(m):
                        for c in range(m):
                            for e in range(c + 1, m):
                                yield (a, b, c, e), R[a][b][c][e]

            run.run("metric flat", curvature)

    if "ii" in items:
        run.run(
            "product commutative",
            lambda: (
                ((a, b, c), C[a][b][c] - C[b][a][c]) for a in range(m) for b in range(a + 1, m) for c in range(m)
            ),
        )

        def assoc():
            for a in range(m):
                for b in range(m):
                    for c in range(m):
                        for f in range(m):
                            lhs = _dot([C[a][b][e] for e in range(m)], [C[e][c][f] for e in range(m)])
                            rhs = _dot([C[b][c][e] for e in range(m)], [C[a][e][f] for e in range(m)])
                            yield (a, b, c, f), lhs - rhs

        run.run("product associative", assoc)

        def invariance():
            c3 = _three_tensor(F)
            for a in range(m):
                for b in range(m):
                    for c in range(m):
                        yield (a, b, c), c3[a][b][c] - c3[a][c][b]

        run.run("metric invariant", invariance)

        def potentiality():
            c3 = _three_tensor(F)
            G = gamma() if not F.flat_coords else None
            for x in range(m):
                for a in range(x + 1, m):
                    for b in range(m):
                        for c in range(m):
                            yield (x, a, b, c), _nabla_c3(c3, G, x, a, b, c) - _nabla_c3(c3, G, a, x, b, c)

        if det0 or F.flat_coords:
            run.run("potentiality", potentiality)

    if "iii" in items:
        e = F.unit

        def unit_law():
            for b in range(m):
                for c in range(m):
                    s = _dot(e, [C[a][b][c] for a in range(m)])
                    yield (b, c), s - _delta(s, b, c)

        run.run("unit", unit_law)

        def unit_flat():
            G = gamma() if not F.flat_coords else None
            for a in range(m):
                for c in range(m):
                    s = e[c].deriv(a)
                    if G is not None:
                        s = s + _dot([G[c][a][b] for b in range(m)], e)
                    yield (a, c), s

        if det0 or F.flat_coords:
            run.run("unit flat", unit_flat)

    if "iv" in items:
        E = F.euler
        D = F.charge if F.charge is not None else measured_charge(F)
        cert.info["charge"] = None if D is None else to_text(QQ(D))
        if D is None:
            run.fail("euler metric", {"reason": "charge could not be measured"})
        else:
            D = QQ(D)
            run.run(
                "euler metric",
                lambda: (
                    ((a, b), s - g[a][b].scale(D))
                    for a, row in enumerate(lie_metric(E, g))
                    for b, s in enumerate(row)
                ),
            )
        run.run(
            "euler product",
            lambda: (
                ((a, b, c), s - C[a][b][c])
                for a, M in enumerate(lie_product(E, C))
                for b, row in enumerate(M)
                for c, s in enumerate(row)
            ),
        )
        run.run("euler unit", lambda: (((c,), s + F.unit[c]) for c, s in enumerate(lie_bracket(E, F.unit))))
    return cert


def _nabla_c3(c3, G, x, a, b, c) -> TruncSeries:
    s = c3[a][b][c].deriv(x)
    if G is None:
        return s
    m = len(c3)
    s = s - _dot([G[e][x][a] for e in range(m)], [c3[e][b][c] for e in range(m)])
    s = s - _dot([G[e][x][b] for e in range(m)], [c3[a][e][c] for e in range(m)])
    s = s - _dot([G[e][x][c] for e in range(m)], [c3[a][b][e] for e in range(m)])
    return s


def _adjoint_residuals(g, M, label_index):
    gm = sm.matmul(g, M)
    r = len(g)
    for i in range(r):
        for j in range(i + 1, r):
            yield label_index + (i, j), gm[i][j] - gm[j][i]


def _mat_residuals(M, label_index):
    for i, row in enumerate(M):
        for j, x in enumerate(row):
            yield label_index + (i, j), x


def verify_presaito(P: PreSaitoData, d: int | None = None) -> Certificate:
    """Check the pre-Saito axioms to order ``d``.

    When ``P.Rinf`` is set, the Higgs field condition reads
    ``Phi_a + nabla_a R0 = [Phi_a, Rinf]``, ``Rinf`` is checked to be flat and
    ``Rinf + Rinf^*`` to be a scalar; with ``Rinf = None`` it is
    ``Phi_a + nabla_a R0 = 0``.
    """
    cert = Certificate("presaito", info={"rank": P.rank, "with_rinf": P.Rinf is not None})
    run = _Runner(cert, d, P.names)
    m, r = P.dim, P.rank
    A, Phi, R0, g = P.A, P.Phi, P.R0, P.g

    def nabla(a, M):
        return sm.add(sm.deriv(M, a), sm.commutator(A[a], M))

    run.run("metric symmetric", lambda: (((i, j), g[i][j] - g[j][i]) for i in range(r) for j in range(i + 1, r)))
    if sm.constant_part(g).det():
        run.ok("metric nondegenerate")
    else:
        run.fail("metric nondegenerate", {"determinant_at_origin": "0"})

    def flat():
        for a in range(m):
            for b in range(a + 1, m):
                F = sm.sub(sm.deriv(A[b], a), sm.deriv(A[a], b))
                F = sm.add(F, sm.commutator(A[a], A[b]))
                yield from _mat_residuals(F, (a, b))

    run.run("connection flat", flat)

    def metric_flat():
        for a in range(m):
            rhs = sm.add(sm.matmul(sm.transpose(A[a]), g), sm.matmul(g, A[a]))
            yield from _mat_residuals(sm.sub(sm.deriv(g, a), rhs), (a,))

    run.run("metric flat", metric_flat)

    def higgs_flat():
        for a in range(m):
            for b in range(a + 1, m):
                yield from _mat_residuals(sm.sub(nabla(a, Phi[b]), nabla(b, Phi[a])), (a, b))

    run.run("higgs flat", higgs_flat)

    def higgs_commute():
        for a in range(m):
            for b in range(a + 1, m):
                yield from _mat_residuals(sm.commutator(Phi[a], Phi[b]), (a, b))

    run.run("higgs commute", higgs_commute)
    run.run(
        "r0 commutes",
        lambda: (item for a in range(m) for item in _mat_residuals(sm.commutator(R0, Phi[a]), (a,))),
    )

    def higgs_r0():
        for a in range(m):
            lhs = sm.add(Phi[a], nabla(a, R0))
            if P.Rinf is not None:
                lhs = sm.sub(lhs, sm.commutator(Phi[a], P.Rinf))
            yield from _mat_residuals(lhs, (a,))

    run.run("higgs r0", higgs_r0)
    run.run(
        "higgs selfadjoint",
        lambda: (item for a in range(m) for item in _adjoint_residuals(g, Phi[a], (a,))),
    )
    run.run("r0 selfadjoint", lambda: _adjoint_residuals(g, R0, ()))
    if P.Rinf is not None:
        Rinf = P.Rinf
        run.run("rinf flat", lambda: (item for a in range(m) for item in _mat_residuals(nabla(a, Rinf), (a,))))

        def rinf_scalar():
            # g Rinf + Rinf^T g = D g
            S = sm.add(sm.matmul(g, Rinf), sm.matmul(sm.transpose(Rinf), g))
            D = _scalar_ratio(S, g)
            if D is None:
                yield (0, 0), S[0][0] + TruncSeries.constant(S[0][0].nvars, 1, S[0][0].order)
                return
            yield from _mat_residuals(sm.sub(S, sm.scale(g, D)), ())

        run.run("rinf scalar", rinf_scalar)
        cert.info["charge"] = _text_or_none(_scalar_ratio(
            sm.add(sm.matmul(g, Rinf), sm.matmul(sm.transpose(Rinf), g)), g
        ))
    return cert


def _scalar_ratio(S, g):
    for i, row in enumerate(g):
        for j, x in enumerate(row):
            c = x.constant_term()
            if c:
                return S[i][j].constant_term() / c
    return None


def _text_or_none(x):
    return None if x is None else to_text(x)


def presaito_charge(P: PreSaitoData):
    """D with Rinf + Rinf^* = D at the origin (None without Rinf)."""
    if P.Rinf is None:
        return None
    g0 = sm.constant_part(P.g)
    R = sm.constant_part(P.Rinf)
    S = g0 @ R + R.transpose() @ g0
    for i in range(g0.nrows):
        for j in range(g0.ncols):
            if g0[i, j]:
                return S[i, j] / g0[i, j]
    return None


# ---------------------------------------------------------------------------
# primitive forms


def check_primitive_form(P: PreSaitoData, omega: PrimitiveFormSection, d: int | None = None) -> Certificate:
    cert = Certificate("primitive form")
    run = _Runner(cert, d, P.names)
    w = omega.omega
    m, r = P.dim, P.rank

    def flat():
        for a in range(m):
            v = sm.matvec(P.A[a], w)
            for i in range(r):
                yield (a, i), w[i].deriv(a) + v[i]

    run.run("section flat", flat)
    if m != r:
        run.fail("period map invertible", {"reason": f"base dimension {m} differs from rank {r}"})
        return cert
    M0 = sm.constant_part(period_map(P, omega, UNIT_NORMALIZED))
    if M0.det():
        run.ok("period map invertible")
    else:
        run.fail("period map invertible", {"determinant_at_origin": "0"})
    return cert


def period_map(P: PreSaitoData, omega: PrimitiveFormSection, convention=UNIT_NORMALIZED) -> sm.SMat:
    """Matrix whose column a is -Phi_a(omega) (unit-normalized) or
    +Phi_a(omega) (as-written)."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    cols = []
    for a in range(P.dim):
        v = sm.matvec(P.Phi[a], omega.omega)
        cols.append([-x for x in v] if convention == UNIT_NORMALIZED else v)
    return sm.transpose(cols)


def frobenius_from_primitive_form(
    P: PreSaitoData, omega: PrimitiveFormSection, d: int | None = None, convention: str = UNIT_NORMALIZED
) -> FrobeniusData:
    """Transport the pre-Saito data to the base through the period map.

    The product is ``phi^-1 (-Phi_a) phi``, the unit ``phi^-1 omega``,
    the Euler field ``phi^-1 R0 omega`` and the metric ``phi^T g phi``.
    """
    if P.dim != P.rank:
        raise NotPrimitive("base dimension differs from the bundle rank")
    phi = period_map(P, omega, convention)
    if not sm.constant_part(phi).det():
        raise NotPrimitive("period map is singular at the origin")
    if d is not None:
        phi = sm.truncate(phi, min(d, _order_or(phi, d)))
    phi_inv = sm.inverse(_finite(phi, d))
    m = P.dim
    C = [[[None] * m for _ in range(m)] for _ in range(m)]
    for a in range(m):
        Ma = sm.matmul(phi_inv, sm.matmul(sm.neg(P.Phi[a]), phi))
        for b in range(m):
            for c in range(m):
                C[a][b][c] = Ma[c][b]
    unit = sm.matvec(phi_inv, omega.omega)
    euler = sm.matvec(phi_inv, sm.matvec(P.R0, omega.omega))
    g = sm.matmul(sm.transpose(phi), sm.matmul(P.g, phi))
    # the charge of the transported metric also depends on the weight of
    # omega, so it is measured by the verifier rather than copied from Rinf
    return FrobeniusData(tuple(P.names), C, g, unit, euler, None, flat_coords=False, convention=convention)


def _order_or(M, default):
    o = None
    for r in M:
        for x in r:
            o = min_order(o, x.order)
    return default if o is None else o


# ---------------------------------------------------------------------------
# flat coordinates and potentials


def flat_coordinates(g: sm.SMat, order: int) -> list:
    """Series x^i(t) = t_i + O(t^2) with d_a d_b x = Gamma^c_ab d_c x.

    The metric in the coordinates x is the constant g(0). Solved degree by
    degree: the degree-k part is recovered from its Hessian by Euler's
    formula ``x_k = sum t_a t_b h_ab / (k (k - 1))``.
    """
    m = len(g)
    G = christoffel(g, order - 2) if order >= 2 else None
    xs = [TruncSeries.param(m, i, order) for i in range(m)]
    for k in range(2, order + 1):
        for i in range(m):
            acc = {}
            for a in range(m):
                for b in range(m):
                    rhs = _dot([G[c][a][b] for c in range(m)], [xs[i].deriv(c) for c in range(m)])
                    for e, c in rhs.homogeneous_part(k - 2).items():
                        e2 = list(e)
                        e2[a] += 1
                        e2[b] += 1
                        e2 = tuple(e2)
                        acc[e2] = acc.get(e2, ZERO) + c
            scale = QQ(1, k * (k - 1))
            xs[i] = xs[i] + TruncSeries(m, order, {e: c * scale for e, c in acc.items()})
    return xs


def invert_coordinates(xs: list, order: int) -> list:
    """Series reversion: t(x) with x(t(x)) = x, for x = t + O(t^2)."""
    m = len(xs)
    ident = [TruncSeries.param(m, i, order) for i in range(m)]
    higher = [x.truncate(order) - ident[i] for i, x in enumerate(xs)]
    ts = list(ident)
    for _ in range(order):
        ts = [ident[i] - higher[i].compose(ts) for i in range(m)]
    return ts


def jacobian(xs: list) -> sm.SMat:
    """J[i][a] = d x^i / d t_a."""
    m = len(xs)
    return [[x.deriv(a) for a in range(m)] for x in xs]


def change_coordinates(F: FrobeniusData, xs: list, order: int, names=None, flat_coords=False) -> FrobeniusData:
    """Express F in new coordinates x(t) (x = t + O(t^2))."""
    m = F.dim
    J = jacobian(xs)
    Jinv = sm.inverse(J)
    ts = invert_coordinates(xs, order)

    def pull(s):
        return s.compose(ts)

    C = [[[None] * m for _ in range(m)] for _ in range(m)]
    # new frame d/dx_i = sum_a Jinv[a][i] d/dt_a
    Cvec = [[[F.C[a][b][c] for c in range(m)] for b in range(m)] for a in range(m)]
    for i in range(m):
        for j in range(m):
            prod = [TruncSeries.zero(m, None) for _ in range(m)]
            for a in range(m):
                for b in range(m):
                    w = Jinv[a][i] * Jinv[b][j]
                    if w.is_zero():
                        continue
                    prod = [p + w * Cvec[a][b][c] for p, c in zip(prod, range(m))]
            img = sm.matvec(J, prod)
            for k in range(m):
                C[i][j][k] = pull(img[k])
    g = sm.matmul(sm.transpose(Jinv), sm.matmul(F.g, Jinv))
    g = [[pull(x) for x in row] for row in g]
    unit = [pull(x) for x in sm.matvec(J, F.unit)]
    euler = [pull(x) for x in sm.matvec(J, F.euler)]
    names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(m))
    return FrobeniusData(names, C, g, unit, euler, F.charge, flat_coords=flat_coords, convention=F.convention)


def potential(F: FrobeniusData, order: int) -> TruncSeries:
    """Potential with third derivatives c_abc = g(d_a * d_b, d_c); requires
    flat coordinates. The cubic part and up come from Euler's formula
    applied to each homogeneous component of c."""
    m = F.dim
    c3 = _three_tensor(F)
    acc: dict = {}
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for e, v in c3[a][b][c].terms.items():
                    k = sum(e)
                    if k > order - 3:
                        continue
                    e2 = list(e)
                    e2[a] += 1
                    e2[b] += 1
                    e2[c] += 1
                    e2 = tuple(e2)
                    acc[e2] = acc.get(e2, ZERO) + v / ((k + 3) * (k + 2) * (k + 1))
    return TruncSeries(m, order, acc)


def third_derivatives(Phi: TruncSeries) -> list:
    m = Phi.nvars
    return [[[Phi.deriv(a).deriv(b).deriv(c) for c in range(m)] for b in range(m)] for a in range(m)]


def wdvv_residuals(Phi: TruncSeries, eta: QMatrix):
    """Yield (index, residual) for the WDVV equations of a potential in flat
    coordinates with constant metric eta."""
    m = Phi.nvars
    eta_inv = eta.inverse()
    T = third_derivatives(Phi)
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for d in range(m):
                    if c <= b:
                        continue
                    lhs = TruncSeries.zero(m, T[0][0][0].order)
                    for e in range(m):
                        for f in range(m):
                            w = eta_inv[e, f]
                            if w:
                                lhs = lhs + (T[a][b][e] * T[f][c][d]).scale(w) - (T[a][c][e] * T[f][b][d]).scale(w)
                    yield (a, b, c, d), lhs
