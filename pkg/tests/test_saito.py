"""Unfoldings, Saito data of the A-series, the primitive form solver, and
the comparison maps between the Fermat and Gepner sides."""

import pytest

from gepner.exactalg.poly import MultiPoly
from gepner.exactalg.rational import QQ
from gepner.exactalg.series import TruncSeries
from gepner.quotient import build_exact_sequence, choose_splitting, run_pipeline
from gepner.saito import (
    InconsistentOrder,
    Unfolding,
    UnfoldingMismatch,
    a_model,
    assemble_zeta,
    candidate_primitive_form_solver,
    euler_field,
    homogeneous_slots,
    j_isomorphism,
    kodaira_spencer,
    matched_unfoldings,
    saito_frobenius,
    unfoldings_match,
    verify_lemma_j,
)
from gepner.frobform import verify_frobenius_axioms
from gepner.symmetry import gepner_polynomial, xvars, yvars


def P(text, vars):
    return MultiPoly.parse(text, vars)


def cubic():
    return Unfolding.versal(P("z^3", ("z",)))


def test_versal_unfolding_weights():
    U = cubic()
    assert [p.to_text() for p in U.deformations] == ["1", "z"]
    assert U.weights == (QQ(1, 3),)
    assert U.param_weights == [1, QQ(2, 3)]
    assert U.polynomial() == P("z^3 + t1*z + t0", ("z", "t0", "t1"))


def test_gepner_unfolding_weights():
    U = Unfolding.versal(gepner_polynomial(4, 2))
    # basis 1, y2, y1 with wt(y1) = 1/4, wt(y2) = 1/2
    assert U.param_weights == [1, QQ(1, 2), QQ(3, 4)]


def test_euler_field_examples():
    E = euler_field(cubic(), 3)
    assert E[0] == TruncSeries.param(2, 0, 3)
    assert E[1] == TruncSeries.param(2, 1, 3).scale(QQ(2, 3))


def test_kodaira_spencer_cubic():
    Phi = kodaira_spencer(cubic(), 2)
    t1 = TruncSeries.param(2, 1, 2)
    # multiplication by z: 1 -> z, z -> z^2 = -t1/3
    assert Phi[1][1][0] == TruncSeries.constant(2, 1, 2)
    assert Phi[1][0][1] == t1.scale(QQ(-1, 3))
    assert Phi[0][0][0] == TruncSeries.constant(2, 1, 2)


def test_deformations_must_span():
    f = P("z^3", ("z",))
    U = Unfolding(f, [P("z", ("z",)), P("2*z", ("z",))], ("t0", "t1"))
    with pytest.raises(UnfoldingMismatch):
        saito_frobenius(U, 1)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_a_model_passes(k):
    M = a_model(k, 3)
    assert M.passed, {n: c.failures for n, c in M.certificates.items()}


def test_a_model_unit_and_metric():
    M = a_model(3, 4)
    assert M.frobenius.unit[0] == TruncSeries.constant(2, 1, M.frobenius.unit[0].order)
    assert M.frobenius.unit[1].is_zero()
    assert M.frobenius.g[0][0].is_zero() and M.frobenius.g[1][1].is_zero()


@pytest.mark.parametrize("k", [3, 4, 5])
def test_solver_finds_scalar_family_for_a_series(k):
    U = Unfolding.versal(P(f"z^{k}", ("z",)))
    res = candidate_primitive_form_solver(U, 4)
    assert res.free_parameter_count == 1
    assert res.certificates[0].passed
    cand = res.candidates[0]
    nonzero = {s: c for s, c in cand.coefficients.items() if c}
    assert nonzero == {((0,) * (k - 1), 0): 1}


def test_solver_scale_is_free():
    U = Unfolding.versal(P("z^4", ("z",)))
    res = candidate_primitive_form_solver(U, 3, scale=QQ(5, 2))
    assert res.certificates[0].passed
    assert res.candidates[0].coefficients[((0, 0, 0), 0)] == QQ(5, 2)


def test_solver_gepner_32_is_constant():
    U = Unfolding.versal(gepner_polynomial(3, 2))
    res = candidate_primitive_form_solver(U, 3)
    assert res.free_parameter_count == 1
    assert res.candidates[0].as_text(U.params, ["1"]) == "1"


def test_solver_gepner_42():
    U = Unfolding.versal(gepner_polynomial(4, 2))
    res = candidate_primitive_form_solver(U, 2)
    assert res.candidates and res.certificates[0].passed
    assert res.free_parameter_count >= 1


def test_homogeneous_slots_have_weight_zero():
    U = Unfolding.versal(gepner_polynomial(4, 2))
    from gepner.milnor import milnor_algebra

    bw = milnor_algebra(U.f).basis_weights()
    for m, b in homogeneous_slots(U, 3):
        assert sum(e * w for e, w in zip(m, U.param_weights)) == bw[b] - bw[0]


def test_inconsistent_order_reports_the_order():
    err = InconsistentOrder(3)
    assert err.order == 3 and "3" in str(err)


# -- Fermat/Gepner comparison ------------------------------------------------------


@pytest.fixture(scope="module")
def matched_42():
    seq = build_exact_sequence(4, 2)
    iota = choose_splitting(seq)
    return matched_unfoldings(4, 2, iota, 1)


def test_matched_unfoldings(matched_42):
    UF, UG = matched_42
    assert unfoldings_match(UF, UG, 2)
    assert [p.to_text() for p in UG.deformations] == ["1", "y2", "y1"]


def test_j_isomorphism_examples(matched_42):
    UF, UG = matched_42
    famF = UF.family(0)
    xs = xvars(2)
    assert j_isomorphism(MultiPoly.one(yvars(2)), famF, 2) == famF.nf_poly(P("x1 - x2", xs))
    assert j_isomorphism(P("y1", yvars(2)), famF, 2) == famF.nf_poly(P("x1^2 - x2^2", xs))


@pytest.mark.parametrize("k", [3, 4, 5])
def test_lemma_j_proportional(k):
    res = verify_lemma_j(k, 2, 1)
    assert res.certificate.passed
    assert res.kappa == 2
    assert all(ok for _, ok in res.per_order)


def test_lemma_j_weight_graded_splitting():
    res = verify_lemma_j(4, 2, 1, "weight-graded")
    assert res.certificate.passed and res.kappa == 2


def test_zeta_for_32():
    pipe = run_pipeline(3, 2, 2)
    z = assemble_zeta(pipe)
    assert z.passed, {n: c.failures for n, c in z.certificates.items()}
    assert z.zeta.at_origin() == MultiPoly.one(yvars(2))
    assert z.kappa == 2


def test_zeta_frobenius_matches_saito_data():
    pipe = run_pipeline(3, 2, 2)
    z = assemble_zeta(pipe)
    assert verify_frobenius_axioms(z.frobenius, 2).passed
