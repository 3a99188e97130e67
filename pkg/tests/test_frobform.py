"""Frobenius and pre-Saito verifiers, the primitive-form functor, potentials."""

import random

import pytest

from gepner.exactalg import smatrix as sm
from gepner.exactalg.linalg import QMatrix
from gepner.exactalg.rational import QQ
from gepner.exactalg.series import TruncSeries
from gepner.frobform import (
    AS_WRITTEN,
    FrobeniusData,
    MalformedData,
    NotPrimitive,
    PreSaitoData,
    PrimitiveFormSection,
    check_primitive_form,
    christoffel,
    flat_coordinates,
    frobenius_from_primitive_form,
    measured_charge,
    period_map,
    verify_frobenius_axioms,
    verify_presaito,
    wdvv_residuals,
)
from gepner.saito import a_model

ORDER = 4


def c(m, value, order=ORDER):
    return TruncSeries.constant(m, value, order)


def t(m, i, order=ORDER):
    return TruncSeries.param(m, i, order)


def potential_structure(lam=QQ(1)):
    """F = t0^2 t1 / 2 + lam * t1^4 with eta = antidiagonal: a 2-dim
    Frobenius manifold built by hand from its potential."""
    m = 2
    F = TruncSeries(2, ORDER + 3, {(2, 1): QQ(1, 2), (0, 4): lam})
    eta = [[0, 1], [1, 0]]
    third = [[[F.deriv(a).deriv(b).deriv(e) for e in range(m)] for b in range(m)] for a in range(m)]
    C = [[[sum((third[a][b][e].scale(eta[e][cc]) for e in range(m)), c(m, 0)) for cc in range(m)] for b in range(m)]
         for a in range(m)]
    g = [[c(m, eta[a][b]) for b in range(m)] for a in range(m)]
    unit = [c(m, 1), c(m, 0)]
    euler = [t(m, 0), t(m, 1).scale(QQ(2, 3))]
    return F, FrobeniusData(("t0", "t1"), C, g, unit, euler, None, flat_coords=True)


def test_hand_built_potential_structure_passes():
    F, data = potential_structure()
    cert = verify_frobenius_axioms(data, ORDER)
    assert cert.passed, cert.failures
    # E = t0 d0 + 2/3 t1 d1 scales the antidiagonal metric by 1 + 2/3
    assert measured_charge(data) == QQ(5, 3)
    assert all(s.is_zero() for _, s in wdvv_residuals(F, QMatrix([[0, 1], [1, 0]])))


def test_flat_coordinate_flag_is_optional():
    _, data = potential_structure()
    curved = FrobeniusData(data.names, data.C, data.g, data.unit, data.euler, None, flat_coords=False)
    assert verify_frobenius_axioms(curved, ORDER).passed


def test_wrong_charge_is_caught():
    _, data = potential_structure()
    wrong = FrobeniusData(data.names, data.C, data.g, data.unit, data.euler, QQ(2), flat_coords=True)
    cert = verify_frobenius_axioms(wrong, ORDER)
    chk = cert.check("euler metric")
    assert not chk.passed and chk.witness["coefficient"]


def test_malformed_shapes():
    _, data = potential_structure()
    with pytest.raises(MalformedData):
        FrobeniusData(data.names, data.C[:1], data.g, data.unit, data.euler)
    with pytest.raises(MalformedData):
        PreSaitoData(("t0",), 1, [], [], [[c(1, 0)]], [[c(1, 1)]])


# -- constant-coefficient pre-Saito data ------------------------------------------


def diagonal_presaito():
    """A = 0, Phi_a = E_aa, R0 = diag(2 - t0, 3 - t1), g = 1."""
    m = 2
    E = lambda i: [[c(m, int(r == i and s == i)) for s in range(m)] for r in range(m)]
    R0 = [[c(m, 2) - t(m, 0), c(m, 0)], [c(m, 0), c(m, 3) - t(m, 1)]]
    g = sm.identity(m, m, ORDER)
    A = [sm.zeros(m, m, m, ORDER) for _ in range(m)]
    return PreSaitoData(("t0", "t1"), m, A, [E(0), E(1)], R0, g)


def test_constant_coefficient_presaito_passes():
    P = diagonal_presaito()
    cert = verify_presaito(P, ORDER)
    assert cert.passed, cert.failures


def test_constant_coefficient_functor():
    P = diagonal_presaito()
    omega = PrimitiveFormSection([c(2, -1), c(2, -1)])
    assert check_primitive_form(P, omega, ORDER).passed
    F = frobenius_from_primitive_form(P, omega, ORDER)
    cert = verify_frobenius_axioms(F, ORDER)
    assert cert.passed, cert.failures
    assert measured_charge(F) == 2
    assert [u.constant_term() for u in F.unit] == [-1, -1]


def test_rank_one_structure():
    P = PreSaitoData(("t",), 1, [[[c(1, 0)]]], [[[c(1, 1)]]], [[-t(1, 0)]], [[c(1, 1)]])
    omega = PrimitiveFormSection([c(1, 1)])
    assert verify_presaito(P, ORDER).passed
    F = frobenius_from_primitive_form(P, omega, ORDER)
    assert verify_frobenius_axioms(F, ORDER).passed
    # unit-normalized: the product is d*d = -d with unit -d
    assert F.C[0][0][0] == c(1, -1) and F.unit[0] == c(1, -1)
    assert F.g[0][0] == c(1, 1)


def test_as_written_convention_flips_the_product():
    P = diagonal_presaito()
    omega = PrimitiveFormSection([c(2, -1), c(2, -1)])
    phi_u = period_map(P, omega)
    phi_w = period_map(P, omega, AS_WRITTEN)
    assert sm.equal(phi_w, sm.neg(phi_u))
    F = frobenius_from_primitive_form(P, omega, ORDER, AS_WRITTEN)
    assert not verify_frobenius_axioms(F, ORDER).check("unit").passed


def test_singular_period_map():
    P = diagonal_presaito()
    with pytest.raises(NotPrimitive):
        frobenius_from_primitive_form(P, PrimitiveFormSection([c(2, 1), c(2, 0)]), ORDER)


@pytest.mark.parametrize("scale", [QQ(2), QQ(-1, 3)])
def test_scaling_the_section(scale):
    M = a_model(4, 3)
    F1 = frobenius_from_primitive_form(M.presaito, M.omega, 3)
    F2 = frobenius_from_primitive_form(M.presaito, PrimitiveFormSection([x.scale(scale) for x in M.omega.omega]), 3)
    m = F1.dim
    for a in range(m):
        for b in range(m):
            assert F2.g[a][b].agrees_with(F1.g[a][b].scale(scale * scale), 2)
            for e in range(m):
                assert F2.C[a][b][e].agrees_with(F1.C[a][b][e], 2)


# -- A-model cross-checks ----------------------------------------------------------


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_a_model_potential_satisfies_wdvv(k):
    M = a_model(k, 4)
    assert M.passed
    eta = sm.constant_part(M.flat_frobenius.g)
    assert all(s.is_zero() for _, s in wdvv_residuals(M.potential, eta))


def test_a2_flat_metric_is_constant():
    M = a_model(3, 5)
    # z^3 + t1 z + t0: the residue metric is already flat, g01 = 1/3
    assert M.frobenius.g[0][1] == TruncSeries.constant(2, QQ(1, 3), M.frobenius.g[0][1].order)
    xs = flat_coordinates(M.frobenius.g, 5)
    assert xs[0] == t(2, 0, 5) and xs[1] == t(2, 1, 5)
    assert all(x.is_zero() for r in christoffel(M.frobenius.g, 5) for s in r for x in s)


# -- mutation sensitivity ----------------------------------------------------------


def perturb(s: TruncSeries, amount) -> TruncSeries:
    return s + TruncSeries.constant(s.nvars, amount, s.order)


def test_frobenius_mutations_have_witnesses():
    M = a_model(4, 3)
    base = M.frobenius
    rng = random.Random(7)
    m = base.dim
    for _ in range(8):
        kind = rng.choice(["metric", "product", "unit", "charge"])
        C = [[list(r) for r in M2] for M2 in base.C]
        g = [list(r) for r in base.g]
        unit, charge = list(base.unit), base.charge
        if kind == "metric":
            a, b = rng.sample(range(m), 2)
            g[a][b] = perturb(g[a][b], 1)
            expect = "metric symmetric"
        elif kind == "product":
            a, b = rng.sample(range(m), 2)
            cc = rng.randrange(m)
            C[a][b][cc] = perturb(C[a][b][cc], 1)
            expect = "product commutative"
        elif kind == "unit":
            i = rng.randrange(m)
            unit[i] = perturb(unit[i], 1)
            expect = "unit"
        else:
            charge = QQ(measured_charge(base)) + 1
            expect = "euler metric"
        bad = FrobeniusData(base.names, C, g, unit, base.euler, charge)
        chk = verify_frobenius_axioms(bad, 3).check(expect)
        assert not chk.passed and chk.witness is not None


def test_presaito_mutations_have_witnesses():
    M = a_model(4, 3)
    P = M.presaito
    r = P.rank
    for a in range(P.dim):
        for i in range(r):
            A = [[list(row) for row in Ma] for Ma in P.A]
            A[a][i][(i + 1) % r] = perturb(A[a][i][(i + 1) % r], 1)
            bad = PreSaitoData(P.names, r, A, P.Phi, P.R0, P.g, P.Rinf)
            assert not verify_presaito(bad, 3).passed
    g = [list(row) for row in P.g]
    g[0][1] = perturb(g[0][1], 1)
    chk = verify_presaito(PreSaitoData(P.names, r, P.A, P.Phi, P.R0, g, P.Rinf), 3).check("metric symmetric")
    assert not chk.passed and chk.witness["index"] == [0, 1]
