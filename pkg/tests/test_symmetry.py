"""Symmetric functions, the Gepner polynomial and Vandermonde products."""

import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import polys
from gepner.exactalg.poly import MultiPoly
from gepner.symmetry import (
    NotSymmetricError,
    SymmetricChangeOfVariables,
    divide_by_vandermonde,
    elementary_symmetric,
    fermat_polynomial,
    gepner_polynomial,
    is_alternating,
    is_symmetric,
    permutation_sign,
    rewrite_in_elementary,
    symmetrize,
    vandermonde,
    xvars,
    yvars,
)


def P(text, vars):
    return MultiPoly.parse(text, vars)


X2, X3 = xvars(2), xvars(3)


def test_elementary_symmetric_small_cases():
    assert elementary_symmetric(1, 2) == P("x1 + x2", X2)
    assert elementary_symmetric(2, 2) == P("x1*x2", X2)
    assert elementary_symmetric(2, 3) == P("x1*x2 + x1*x3 + x2*x3", X3)
    with pytest.raises(ValueError):
        elementary_symmetric(3, 2)


@pytest.mark.parametrize(
    "k,n,text",
    [
        (3, 2, "y1^3 - 3*y1*y2"),
        (4, 2, "y1^4 - 4*y1^2*y2 + 2*y2^2"),
        (4, 3, "y1^4 - 4*y1^2*y2 + 2*y2^2 + 4*y1*y3"),
    ],
)
def test_gepner_polynomial_small_cases(k, n, text):
    assert gepner_polynomial(k, n) == P(text, yvars(n))


def test_cubic_identity_by_hand():
    x1, x2 = MultiPoly.gens(X2)
    assert (x1 + x2) ** 3 - 3 * (x1 + x2) * (x1 * x2) == x1**3 + x2**3


def brute_force_pull_back(p: MultiPoly, n: int) -> MultiPoly:
    # oracle: substitute y_i -> sigma_i built from combinations directly
    xs = MultiPoly.gens(xvars(n))
    images = {}
    for i in range(1, n + 1):
        acc = MultiPoly.zero(xvars(n))
        for combo in itertools.combinations(xs, i):
            term = MultiPoly.one(xvars(n))
            for c in combo:
                term = term * c
            acc = acc + term
        images[f"y{i}"] = acc
    return p.substitute(images).extend(xvars(n))


@pytest.mark.parametrize("k,n", [(k, n) for k in range(2, 8) for n in range(1, k)])
def test_gepner_identity_against_brute_force(k, n):
    assert brute_force_pull_back(gepner_polynomial(k, n), n) == fermat_polynomial(k, n)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_generating_identity(n):
    assert SymmetricChangeOfVariables(n).generating_identity_holds()


def test_pull_back_examples():
    sub = SymmetricChangeOfVariables(2)
    assert sub.pull_back(P("y1^2", yvars(2))) == P("x1^2 + 2*x1*x2 + x2^2", X2)
    ident = P("x1^2*x2 - 3", X2)
    assert ident.substitute({v: MultiPoly.var(X2, v) for v in X2}) == ident


def test_vandermonde_small_cases():
    assert vandermonde(1) == MultiPoly.one(xvars(1))
    assert vandermonde(2) == P("x1 - x2", X2)
    w3 = vandermonde(3)
    assert len(w3.terms) == 6 and set(w3.terms.values()) == {1, -1}
    assert is_alternating(w3)


def test_symmetrize_examples():
    x1 = P("x1", X2)
    assert symmetrize(x1) == P("x1 + x2", X2)
    assert symmetrize(x1, "sign") == P("x1 - x2", X2)
    assert symmetrize(P("x1^2*x2", X2), "sign") == P("x1^2*x2 - x1*x2^2", X2)


def test_permutation_sign():
    for perm in itertools.permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        assert permutation_sign(perm) == (-1) ** inversions


@given(polys(vars=X3, max_terms=3, max_deg=2))
def test_symmetrized_polys_rewrite_and_pull_back(p):
    s = symmetrize(p)
    assert is_symmetric(s)
    q = rewrite_in_elementary(s, 3)
    assert SymmetricChangeOfVariables(3).pull_back(q) == s


@given(polys(vars=X3, max_terms=3, max_deg=3))
def test_alternating_polys_are_vandermonde_multiples(p):
    a = symmetrize(p, "sign")
    assert is_alternating(a)
    q = divide_by_vandermonde(a, 3)
    assert is_symmetric(q) and q * vandermonde(3) == a


def test_rewrite_examples():
    assert rewrite_in_elementary(P("x1^2 + x2^2", X2), 2) == P("y1^2 - 2*y2", yvars(2))
    for i in range(1, 4):
        assert rewrite_in_elementary(elementary_symmetric(i, 3), 3) == MultiPoly.var(yvars(3), f"y{i}")
    assert rewrite_in_elementary(fermat_polynomial(3, 2), 2) == gepner_polynomial(3, 2)
    with pytest.raises(NotSymmetricError):
        rewrite_in_elementary(P("x1", X2), 2)


@given(st.integers(2, 7).flatmap(lambda k: st.tuples(st.just(k), st.integers(1, k - 1))))
def test_gepner_is_weighted_homogeneous(kn):
    k, n = kn
    weights = list(range(1, n + 1))
    assert gepner_polynomial(k, n).weighted_degrees(weights) == {k}
