"""Saito structures on unfolding bases.

An ``Unfolding`` deforms a quasi-homogeneous polynomial by a basis of its
Milnor algebra. With a form ``P dz`` (``P`` a family class) the base
carries the Kodaira-Spencer product, the metric ``lambda(phi_a phi_b P^2)``,
the unit ``d/dt_0`` and the Euler field ``sum (1 - wt phi_a) t_a d/dt_a``.

``candidate_primitive_form_solver`` searches for ``P`` order by order so
that these data form a Frobenius manifold. The functions at the end
compare the Gepner side with the Fermat side through ``y = sigma(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import factorial
from typing import Sequence

from .exactalg import smatrix as sm
from .exactalg.linalg import NoSolution, QMatrix, linear_solve
from .exactalg.poly import MultiPoly, exact_divide
from .exactalg.rational import ONE, QQ, ZERO, to_text
from .exactalg.series import PrecisionError, TruncSeries, all_monomials
from .frobform import (
    UNIT_NORMALIZED,
    Certificate,
    FrobeniusData,
    PreSaitoData,
    PrimitiveFormSection,
    change_coordinates,
    christoffel,
    flat_coordinates,
    frobenius_from_primitive_form,
    potential,
    verify_frobenius_axioms,
    verify_presaito,
)
from .milnor import FamilyMilnorAlgebra, MilnorAlgebra, quasi_homogeneous_weights


class UnfoldingMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# unfoldings


@dataclass
class Unfolding:
    f: MultiPoly
    deformations: list  # polynomials in the variables of f
    params: tuple

    @classmethod
    def versal(cls, f: MultiPoly, prefix: str = "t") -> "Unfolding":
        """Deform by the standard monomials of the Milnor algebra."""
        A = MilnorAlgebra(f)
        return cls(f, A.basis_polys(), tuple(f"{prefix}{i}" for i in range(A.dimension)))

    @cached_property
    def weights(self) -> tuple:
        w = quasi_homogeneous_weights(self.f)
        if w is None:
            raise ValueError("polynomial is not quasi-homogeneous")
        return w

    def deformation_weight(self, a: int):
        p = self.deformations[a]
        ws = p.weighted_degrees(self.weights) if not p.is_zero() else set()
        if len(ws) != 1:
            raise ValueError(f"deformation {a} is not weighted-homogeneous")
        return QQ(next(iter(ws)))

    @cached_property
    def param_weights(self) -> list:
        """wt(t_a) = 1 - wt(phi_a)."""
        return [ONE - self.deformation_weight(a) for a in range(len(self.deformations))]

    def polynomial(self) -> MultiPoly:
        names = self.f.vars + self.params
        out = self.f.extend(names)
        for t, p in zip(self.params, self.deformations):
            out = out + MultiPoly.var(names, t) * p.extend(names)
        return out

    def family(self, order: int) -> FamilyMilnorAlgebra:
        return FamilyMilnorAlgebra(self.f, self.deformations, order, self.params)


def unfolding(f: MultiPoly) -> Unfolding:
    return Unfolding.versal(f)


# ---------------------------------------------------------------------------
# Saito data


def _unit_series(m, i, npar, order):
    return [TruncSeries.constant(npar, 1 if j == i else 0, order) for j in range(m)]


def _ks_frame(fam: FamilyMilnorAlgebra):
    """Columns: classes of the deformations. Returns (Psi, Psi^-1) or
    (None, None) when Psi is the identity."""
    m = fam.dimension
    cols = fam.deformation_classes
    identity = all(
        cols[a][c] == TruncSeries.constant(fam.nparams, 1 if a == c else 0, fam.order)
        for a in range(m)
        for c in range(m)
    )
    if identity:
        return None, None
    Psi = sm.transpose(cols)
    if not sm.constant_part(Psi).det():
        raise UnfoldingMismatch("deformations do not form a basis of the Milnor algebra at the origin")
    return Psi, sm.inverse(Psi)


def kodaira_spencer(U: Unfolding, d: int, fam: FamilyMilnorAlgebra | None = None) -> list:
    """Phi[a]: multiplication by the class of phi_a, in the frozen basis."""
    fam = fam or U.family(d)
    return [fam.mult_matrix(v) for v in fam.deformation_classes]


def euler_field(U: Unfolding, order=None) -> list:
    m = len(U.params)
    return [TruncSeries.param(m, a, order).scale(w) for a, w in enumerate(U.param_weights)]


def euler_multiplication(U: Unfolding, d: int, fam: FamilyMilnorAlgebra | None = None) -> sm.SMat:
    """R0 = E * in the frozen basis."""
    fam = fam or U.family(d)
    E = euler_field(U, d)
    Phi = kodaira_spencer(U, d, fam)
    r = fam.dimension
    out = sm.zeros(r, r, len(U.params), d)
    for a, M in enumerate(Phi):
        out = sm.add(out, [[E[a] * x for x in row] for row in M])
    return out


def form_class(fam: FamilyMilnorAlgebra, P) -> list:
    """Family class of a form factor given as None (=1), a MultiPoly in z, a
    vector of series, or a dict {basis index: series}."""
    order = fam.order
    npar = fam.nparams
    if P is None:
        return fam.unit()
    if isinstance(P, MultiPoly):
        return fam.nf_poly(P)
    if isinstance(P, dict):
        out = [TruncSeries.zero(npar, order) for _ in range(fam.dimension)]
        for b, s in P.items():
            out = [o + s * x for o, x in zip(out, fam.nf_monomial(fam.basis[b], order))]
        return out
    return list(P)


def saito_frobenius(
    U: Unfolding, d: int, P=None, fam: FamilyMilnorAlgebra | None = None, names=None
) -> FrobeniusData:
    """Frobenius data of the form ``P dz`` on the unfolding base to order d."""
    fam = fam or U.family(d)
    m = fam.dimension
    npar = fam.nparams
    if len(U.deformations) != m:
        raise UnfoldingMismatch("need exactly one deformation per basis element")
    Psi, Psi_inv = _ks_frame(fam)
    mults = [fam.mult_matrix(v) for v in fam.deformation_classes]
    C = [[[None] * m for _ in range(m)] for _ in range(m)]
    # products phi_a * phi_b as vectors in the frozen basis
    prods = []
    for a in range(m):
        Ma = mults[a] if Psi is None else sm.matmul(mults[a], Psi)
        prods.append(Ma)
        Ca = Ma if Psi is None else sm.matmul(Psi_inv, Ma)
        for b in range(m):
            for c in range(m):
                C[a][b][c] = Ca[c][b]
    p = form_class(fam, P)
    p2 = fam.multiply(p, p)
    ell = [fam.residue(fam.multiply([_e(npar, c == j, fam.order) for j in range(m)], p2)) for c in range(m)]
    g = [[None] * m for _ in range(m)]
    for a in range(m):
        for b in range(a, m):
            s = _dot([prods[a][c][b] for c in range(m)], ell)
            g[a][b] = g[b][a] = s
    one = fam.unit()
    unit = one if Psi is None else sm.matvec(Psi_inv, one)
    euler = euler_field(U, None)
    return FrobeniusData(
        tuple(names or U.params), C, g, unit, euler, None, flat_coords=False, convention=UNIT_NORMALIZED
    )


def _e(npar, flag, order):
    return TruncSeries.constant(npar, 1 if flag else 0, order)


def _dot(u, v):
    acc = None
    for a, b in zip(u, v):
        term = a * b
        acc = term if acc is None else acc + term
    return acc


def presaito_from_frobenius(F: FrobeniusData, d: int | None = None) -> tuple[PreSaitoData, PrimitiveFormSection]:
    """Pre-Saito data on E = TM: A = Levi-Civita, Phi = -C, R0 = E *,
    Rinf = nabla E, and the unit as primitive section."""
    m = F.dim
    G = christoffel(F.g, d)
    A = [[[G[c][a][b] for b in range(m)] for c in range(m)] for a in range(m)]
    Phi = [sm.neg(F.mult_matrix(a)) for a in range(m)]
    R0 = sm.zeros(m, m, m, None)
    for a in range(m):
        R0 = sm.add(R0, [[F.euler[a] * x for x in row] for row in F.mult_matrix(a)])
    Rinf = [
        [F.euler[c].deriv(b) + _dot([G[c][b][a] for a in range(m)], F.euler) for b in range(m)]
        for c in range(m)
    ]
    P = PreSaitoData(tuple(F.names), m, A, Phi, R0, [list(r) for r in F.g], Rinf)
    return P, PrimitiveFormSection(list(F.unit))


# ---------------------------------------------------------------------------
# A_{k-1}


@dataclass
class AModel:
    k: int
    order: int
    unfolding: Unfolding
    frobenius: FrobeniusData
    presaito: PreSaitoData
    omega: PrimitiveFormSection
    transported: FrobeniusData
    flat_coordinates: list
    flat_frobenius: FrobeniusData
    potential: TruncSeries
    certificates: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates.values())


def a_model(k: int, d: int) -> AModel:
    """Saito data of z^k with primitive form dz, to order d."""
    if k < 2:
        raise ValueError("need k >= 2")
    z = MultiPoly.var(("z",), "z")
    U = Unfolding.versal(z**k)
    fam = U.family(d + 1)
    F = saito_frobenius(U, d + 1, None, fam)
    P, omega = presaito_from_frobenius(F, d)
    transported = frobenius_from_primitive_form(P, omega, d)
    m = F.dim
    xs = flat_coordinates(F.g, d + 1) if m > 0 else []
    flat = change_coordinates(
        F, xs, d, names=tuple(f"x{i}" for i in range(m)), flat_coords=True
    )
    Phi = potential(flat, d + 2)
    certs = {
        "frobenius": verify_frobenius_axioms(F, d),
        "presaito": verify_presaito(P, d),
        "transported": verify_frobenius_axioms(transported, d),
        "flat": verify_frobenius_axioms(flat, d),
    }
    return AModel(k, d, U, F, P, omega, transported, xs, flat, Phi, certs)


# ---------------------------------------------------------------------------
# primitive form search


@dataclass
class CandidatePrimitiveForm:
    slots: list  # (t-exponent, basis index)
    coefficients: dict  # slot -> rational
    order: int
    free_parameters: list  # nullity per order (order 0: the overall scale)
    form: list  # family class of P

    @property
    def solution_dimension(self) -> int:
        return sum(self.free_parameters)

    def as_text(self, params, basis_text) -> str:
        parts = []
        for (m, b), c in sorted(self.coefficients.items(), key=lambda kv: (sum(kv[0][0]), kv[0])):
            if not c:
                continue
            mono = MultiPoly.monomial(params, m).to_text()
            term = f"{to_text(c)}"
            if mono != "1":
                term += f"*{mono}"
            if basis_text[b] != "1":
                term += f"*{basis_text[b]}"
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ") or "0"


@dataclass
class SolverResult:
    unfolding: Unfolding
    candidates: list
    certificates: list
    log: list

    @property
    def free_parameter_count(self) -> int:
        return self.candidates[0].solution_dimension if self.candidates else 0


class InconsistentOrder(ValueError):
    def __init__(self, order):
        super().__init__(f"primitive form equations are inconsistent at order {order}")
        self.order = order


def homogeneous_slots(U: Unfolding, d: int) -> list:
    """(t^m, e_b) with wt(t^m) + wt(e_b) = 0: the weight-zero ansatz terms."""
    A = MilnorAlgebra(U.f)
    bw = A.basis_weights()
    tw = U.param_weights
    m = len(U.params)
    out = []
    for exp in all_monomials(m, d):
        w = sum((QQ(e) * x for e, x in zip(exp, tw)), ZERO)
        for b, wb in enumerate(bw):
            if w + wb == 0:
                out.append((tuple(exp), b))
    out.sort(key=lambda s: (sum(s[0]), s[0], s[1]))
    return out


def _form_from(fam, coeffs, order):
    npar = fam.nparams
    out = [TruncSeries.zero(npar, order) for _ in range(fam.dimension)]
    for (m, b), c in coeffs.items():
        if not c or sum(m) > order:
            continue
        vec = fam.nf_monomial(fam.basis[b], order - sum(m))
        out = [o + x.shift(m).scale(c) for o, x in zip(out, vec)]
    return out


def _condition_vector(U, fam_k, coeffs, k):
    """Residual coefficients of the degree-k equations for the current ansatz."""
    F = saito_frobenius(U, k, _form_from(fam_k, coeffs, k), fam_k)
    cert_items = []
    m = F.dim
    G = christoffel(F.g, k - 1)
    values = []
    # curvature at degree k - 2
    if k >= 2:
        from .frobform import riemann

        R = riemann(G)
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    for e in range(c + 1, m):
                        values.extend(_degree_coeffs(R[a][b][c][e], k - 2))
    # potentiality and flat unit at degree k - 1
    from .frobform import _nabla_c3, _three_tensor

    c3 = _three_tensor(F)
    for x in range(m):
        for a in range(x + 1, m):
            for b in range(m):
                for c in range(m):
                    s = _nabla_c3(c3, G, x, a, b, c) - _nabla_c3(c3, G, a, x, b, c)
                    values.extend(_degree_coeffs(s, k - 1))
    for a in range(m):
        for c in range(m):
            s = F.unit[c].deriv(a) + _dot([G[c][a][b] for b in range(m)], F.unit)
            values.extend(_degree_coeffs(s, k - 1))
    return values


def _degree_coeffs(s: TruncSeries, deg: int) -> list:
    mons = all_monomials(s.nvars, deg)
    return [s.coeff(e) for e in mons if sum(e) == deg]


def candidate_primitive_form_solver(U: Unfolding, d: int, scale=1) -> SolverResult:
    """Weight-zero forms P dz satisfying the Frobenius equations to order d.

    At each order the unknown degree-k coefficients enter the curvature
    (degree k - 2), potentiality and flat-unit (degree k - 1) equations
    affinely; the system is solved exactly and free parameters are set to
    zero. The count of free parameters, including the overall scale, is
    recorded per order.
    """
    slots = homogeneous_slots(U, d)
    zero_slot = ((0,) * len(U.params), 0)
    if zero_slot not in slots:
        raise ValueError("constant form is not among the weight-zero terms")
    coeffs = {s: ZERO for s in slots}
    coeffs[zero_slot] = QQ(scale)
    free = [1]
    log = []
    fams = {}
    for k in range(1, d + 1):
        layer = [s for s in slots if sum(s[0]) == k]
        if not layer:
            free.append(0)
            continue
        fam_k = fams.setdefault(k, U.family(k))
        base = _condition_vector(U, fam_k, coeffs, k)
        cols = []
        for s in layer:
            trial = dict(coeffs)
            trial[s] = ONE
            v = _condition_vector(U, fam_k, trial, k)
            cols.append([x - y for x, y in zip(v, base)])
        if not base:
            free.append(len(layer))
            continue
        A = QMatrix([list(r) for r in zip(*cols)], len(layer))
        try:
            sol = linear_solve(A, QMatrix.column([-x for x in base]))
        except NoSolution:
            raise InconsistentOrder(k) from None
        for s, v in zip(layer, sol.particular.col(0)):
            coeffs[s] = v
        free.append(sol.nullity)
        log.append({"order": k, "unknowns": len(layer), "equations": len(base), "free": sol.nullity})
    fam = U.family(d)
    form = _form_from(fam, coeffs, d)
    cand = CandidatePrimitiveForm(slots, coeffs, d, free, form)
    F = saito_frobenius(U, d, form, fam)
    cert = verify_frobenius_axioms(F, d)
    return SolverResult(U, [cand], [cert], log)


def form_series(cand: CandidatePrimitiveForm, npar: int, order: int) -> dict:
    """{basis index: series in t} for the candidate P."""
    out: dict = {}
    for (m, b), c in cand.coefficients.items():
        if c and sum(m) <= order:
            out.setdefault(b, TruncSeries.zero(npar, order))
            out[b] = out[b] + TruncSeries(npar, order, {m: c})
    return out


# ---------------------------------------------------------------------------
# comparison with the Fermat side through y = sigma(x)


def _sym_change(n):
    from .symmetry import SymmetricChangeOfVariables

    return SymmetricChangeOfVariables(n)


def matched_unfoldings(k: int, n: int, iota, order: int):
    """The Fermat deformation rho_b along N and its Gepner counterpart
    psi_b = rho_b rewritten in elementary symmetric polynomials."""
    from .quotient import build_exact_sequence
    from .symmetry import fermat_polynomial, gepner_polynomial, rewrite_in_elementary, yvars

    seq = build_exact_sequence(k, n)
    inv = seq.invariants
    m = seq.gepner.dimension
    rho = [iota.representative(inv, b) for b in range(m)]
    psi = [rewrite_in_elementary(r, n).extend(yvars(n)) for r in rho]
    params = tuple(f"s{b}" for b in range(m))
    UF = Unfolding(fermat_polynomial(k, n), rho, params)
    UG = Unfolding(gepner_polynomial(k, n), psi, params)
    return UF, UG


def unfoldings_match(UF: Unfolding, UG: Unfolding, n: int) -> bool:
    """F~_N(x, s) == G~(sigma(x), s) as polynomials."""
    sub = _sym_change(n)
    G = UG.polynomial()
    images = dict(sub.images)
    lhs = UF.polynomial()
    rhs = G.substitute({y: p.extend(sub.xs + UG.params) for y, p in images.items()})
    return lhs.extend(sub.xs + UF.params) == rhs.extend(sub.xs + UF.params)


def j_isomorphism(psi: MultiPoly, famF: FamilyMilnorAlgebra, n: int) -> list:
    """Class of psi(sigma(x)) * w_n in the Fermat family algebra."""
    from .symmetry import vandermonde

    sub = _sym_change(n)
    return famF.nf_poly(sub.pull_back(psi) * vandermonde(n))


@dataclass
class LemmaJResult:
    k: int
    n: int
    order: int
    kappa: object
    per_order: list  # (order, proportional?)
    certificate: Certificate


def verify_lemma_j(k: int, n: int, d: int, strategy: str = "monomial") -> LemmaJResult:
    """Compare the Gepner family Gram matrix with the pullback under j of
    the Fermat family pairing along N; both must be proportional with one
    constant at every order up to d."""
    from .frobform import Check
    from .quotient import build_exact_sequence, choose_splitting

    seq = build_exact_sequence(k, n)
    iota = choose_splitting(seq, strategy)
    UF, UG = matched_unfoldings(k, n, iota, d)
    cert = Certificate("lemma j", info={"k": k, "n": n, "order": d, "splitting": strategy})
    match = unfoldings_match(UF, UG, n)
    cert.checks.append(Check("unfoldings match", match, None if match else {"reason": "F~_N != G~ o sigma"}))
    famG = FamilyMilnorAlgebra(UG.f, UG.deformations, d, UG.params)
    famF = FamilyMilnorAlgebra(UF.f, UF.deformations, d, UF.params)
    gram_G = famG.gram
    gram_F = famF.gram
    m = famG.dimension
    v = [j_isomorphism(p, famF, n) for p in famG.base.basis_polys()]
    pulled = [[None] * m for _ in range(m)]
    for a in range(m):
        Gv = sm.matvec(gram_F, v[a])
        for b in range(m):
            pulled[a][b] = _dot(Gv, v[b])
    kappa = None
    for a in range(m):
        for b in range(m):
            g0 = gram_G[a][b].constant_term()
            if g0:
                kappa = pulled[a][b].constant_term() / g0
                break
        if kappa is not None:
            break
    per_order = []
    witness = None
    for o in range(d + 1):
        ok = kappa is not None
        for a in range(m):
            for b in range(m):
                diff = pulled[a][b] - gram_G[a][b].scale(kappa or 0)
                hit = diff.first_difference(TruncSeries.zero(diff.nvars, diff.order), o)
                if hit is not None:
                    ok = False
                    if witness is None:
                        witness = {"index": [a, b], "monomial": list(hit[0]), "order": o}
        per_order.append((o, ok))
    cert.checks.append(Check("gram proportional", all(ok for _, ok in per_order), witness, d))
    cert.info["kappa"] = None if kappa is None else to_text(kappa)
    return LemmaJResult(k, n, d, kappa, per_order, cert)


@dataclass
class ZetaForm:
    """zeta = Q(y, s) dy_1 ... dy_n on the Gepner unfolding."""

    Q: dict  # {s-exponent: polynomial in y}
    params: tuple
    provenance: dict

    def at_origin(self) -> MultiPoly:
        return self.Q.get((0,) * len(self.params), None)

    def to_text(self) -> str:
        parts = []
        for gamma, p in sorted(self.Q.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            s = MultiPoly.monomial(self.params, gamma).to_text()
            parts.append(f"({p.to_text()})" + ("" if s == "1" else f"*{s}"))
        return " + ".join(parts) or "0"


@dataclass
class ZetaResult:
    zeta: ZetaForm
    frobenius: FrobeniusData
    kappa: object
    certificates: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates.values())


def _series_poly_mul(a: dict, b: dict, order: int) -> dict:
    out: dict = {}
    for g1, p1 in a.items():
        for g2, p2 in b.items():
            g = tuple(x + y for x, y in zip(g1, g2))
            if sum(g) > order:
                continue
            out[g] = out[g] + p1 * p2 if g in out else p1 * p2
    return {g: p for g, p in out.items() if not p.is_zero()}


def _vector_to_poly(vec: list, polys: list) -> dict:
    """sum_j vec[j] * polys[j] as {s-exponent: polynomial}."""
    out: dict = {}
    for s, p in zip(vec, polys):
        for e, c in s.terms.items():
            out[e] = out[e] + p * c if e in out else p * c
    return {e: p for e, p in out.items() if not p.is_zero()}


def assemble_zeta(pipeline, d: int | None = None) -> ZetaResult:
    """Form the Gepner-side form zeta from omega and compare its Frobenius
    data with the quotient-side structure on N."""
    from .frobform import Check
    from .symmetry import rewrite_in_elementary, vandermonde, xvars, yvars

    d = pipeline.order if d is None else d
    k, n = pipeline.k, pipeline.n
    inv = pipeline.quotient.invariants
    iota = pipeline.splitting
    ND = pipeline.N
    m = iota.matrix.ncols
    omega = ND.omega.omega
    # omega as an antiinvariant polynomial with series coefficients
    anti = [inv.anti_sum(j) for j in range(inv.anti_dimension)]
    omega_poly = _vector_to_poly([x.truncate(min(d, x.order if x.order is not None else d)) for x in omega], anti)
    # the Fermat form factor restricted to N
    FS = pipeline.quotient.fermat
    if FS.form is None:
        form_poly = {(0,) * m: MultiPoly.one(xvars(n))}
    else:
        images = []
        for a in inv.algebra.basis:
            O = inv.orbit_of[a]
            images.append(TruncSeries(m, None, {tuple(int(j == b) for j in range(m)): iota.matrix[O, b] for b in range(m)}))
        vec, polys = [], []
        for b, s in FS.form.items():
            vec.append(s.truncate(min(d, s.order)).compose(images))
            polys.append(MultiPoly.monomial(xvars(n), inv.algebra.basis[b]))
        form_poly = _vector_to_poly(vec, polys)
    prod = _series_poly_mul(omega_poly, form_poly, d)
    wn = vandermonde(n)
    Q = {}
    for gamma, p in prod.items():
        q = exact_divide(p.extend(xvars(n)), wn)
        Q[gamma] = rewrite_in_elementary(q, n).extend(yvars(n))
    UF, UG = matched_unfoldings(k, n, iota, d)
    params = UG.params
    zeta = ZetaForm(Q, params, {"splitting": iota.strategy, "omega_origin": "vandermonde class"})
    famG = FamilyMilnorAlgebra(UG.f, UG.deformations, d, params)
    form = famG.nf_family(Q, d)
    FZ = saito_frobenius(UG, d, form, famG, names=params)
    FN = ND.frobenius
    certs = {"zeta frobenius": verify_frobenius_axioms(FZ, d)}
    cmp = Certificate("zeta comparison", info={"splitting": iota.strategy})
    bad = None
    for a in range(m):
        for b in range(m):
            for c in range(m):
                hit = FZ.C[a][b][c].first_difference(FN.C[a][b][c], d)
                if hit is not None and bad is None:
                    bad = {"index": [a, b, c], "monomial": list(hit[0])}
    cmp.checks.append(Check("structure constants equal", bad is None, bad, d))
    kappa = None
    for a in range(m):
        for b in range(m):
            z0 = FZ.g[a][b].constant_term()
            if z0 and kappa is None:
                kappa = FN.g[a][b].constant_term() / z0
    bad = None if kappa is not None else {"reason": "zeta metric vanishes at the origin"}
    if kappa is not None:
        for a in range(m):
            for b in range(m):
                hit = FN.g[a][b].first_difference(FZ.g[a][b].scale(kappa), d)
                if hit is not None and bad is None:
                    bad = {"index": [a, b], "monomial": list(hit[0])}
    cmp.checks.append(Check("metrics proportional", bad is None, bad, d))
    # orbifold normalization: the quotient pairing is the upstairs residue
    # pairing divided by |S_n| = n!; with it the two metrics agree on the nose
    order_w = factorial(n)
    bad = None
    for a in range(m):
        for b in range(m):
            hit = FN.g[a][b].first_difference(FZ.g[a][b].scale(order_w), d)
            if hit is not None and bad is None:
                bad = {"index": [a, b], "monomial": list(hit[0])}
    cmp.checks.append(Check("metrics equal", bad is None, bad, d, f"quotient metric divided by {n}!"))
    same_unit = all(FZ.unit[c].agrees_with(FN.unit[c], d) for c in range(m))
    cmp.checks.append(Check("units equal", same_unit))
    same_euler = all(FZ.euler[c].agrees_with(FN.euler[c], d) for c in range(m))
    cmp.checks.append(Check("euler fields equal", same_euler))
    origin = Q.get((0,) * m)
    const = origin is not None and origin.is_constant() and not origin.is_zero()
    cmp.checks.append(Check("zeta constant at origin", const, None if const else {"Q0": None if origin is None else origin.to_text()}))
    cmp.info["kappa"] = None if kappa is None else to_text(kappa)
    certs["comparison"] = cmp
    return ZetaResult(zeta, FZ, kappa, certs)
