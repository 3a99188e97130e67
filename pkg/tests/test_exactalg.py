"""Exact arithmetic kernel: polynomials, truncated series, linear algebra."""

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import VARS, frac, nonzero_rationals, polys, rationals, series, units
from gepner.exactalg import smatrix as sm
from gepner.exactalg.linalg import LinearAlgebraError, NoSolution, QMatrix, bareiss_det, linear_solve, rank_of
from gepner.exactalg.poly import DivisionError, MultiPoly, exact_divide, grevlex_key, monomials_up_to
from gepner.exactalg.rational import QQ, from_pair, qq, to_pair, to_text
from gepner.exactalg.series import PrecisionError, TruncSeries


def to_sympy(p: MultiPoly):
    syms = sympy.symbols(p.vars)
    return sum(
        (sympy.Rational(int(c.numerator), int(c.denominator)) * sympy.Mul(*[s**k for s, k in zip(syms, e)])
         for e, c in p.terms.items()),
        sympy.Integer(0),
    )


# -- rationals -----------------------------------------------------------------


def test_qq_coercions():
    assert qq("-3/4") == QQ(-3, 4)
    assert qq(Fraction(5, 10)) == QQ(1, 2)
    with pytest.raises(TypeError):
        qq(0.5)


@given(rationals)
def test_pair_round_trip(c):
    assert from_pair(*to_pair(c)) == c
    assert qq(to_text(c)) == c


# -- polynomials ---------------------------------------------------------------


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == MultiPoly.zero(VARS)
    assert p * MultiPoly.one(VARS) == p


@given(polys(), polys())
def test_product_matches_sympy(p, q):
    assert sympy.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0


@given(polys(), polys())
def test_leibniz_rule(p, q):
    for v in VARS:
        assert (p * q).diff(v) == p.diff(v) * q + p * q.diff(v)


@given(polys())
def test_text_round_trip(p):
    assert MultiPoly.parse(p.to_text(), VARS) == p


@given(polys(), polys(max_terms=3).filter(lambda q: not q.is_zero()))
def test_exact_divide_inverts_multiplication(p, q):
    assert exact_divide(p * q, q) == p


def test_exact_divide_rejects_non_multiples():
    x, y = MultiPoly.gens(("x", "y"))
    with pytest.raises(DivisionError):
        exact_divide(x**2 + y, x)


def test_canonical_text():
    p = MultiPoly.parse("3*x1^2*x2 - 1/2*x2^3", ("x1", "x2"))
    assert p.coeff((2, 1)) == 3 and p.coeff((0, 3)) == QQ(-1, 2)
    assert MultiPoly.parse(p.to_text(), ("x1", "x2")) == p


@given(polys(), polys(), polys())
def test_substitution_is_a_ring_map(p, a, b):
    img = {"x": a, "y": b}
    q = MultiPoly.parse("x*y - z^2", VARS)
    assert (p * q).substitute(img) == p.substitute(img) * q.substitute(img)


def test_grevlex_order():
    # grevlex: higher total degree first; ties broken by the last variable
    exps = [(1, 0, 0), (0, 1, 1), (2, 0, 0), (0, 0, 2), (1, 1, 0)]
    assert sorted(exps, key=grevlex_key, reverse=True)[0] in {(2, 0, 0)}
    assert grevlex_key((1, 1, 0)) > grevlex_key((1, 0, 1)) > grevlex_key((0, 0, 2))


def test_monomials_up_to_counts():
    from math import comb

    assert len(list(monomials_up_to(3, 4))) == comb(4 + 3, 3)


# -- truncated series ----------------------------------------------------------


@given(series(), series(), series())
def test_series_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(units())
def test_series_inverse(u):
    one = TruncSeries.constant(u.nvars, 1, u.order)
    assert u * u.inverse() == one


def test_series_inverse_requires_unit_and_order():
    t = TruncSeries.param(1, 0, 3)
    with pytest.raises(ZeroDivisionError):
        t.inverse()
    with pytest.raises(PrecisionError):
        TruncSeries.constant(1, 2).inverse()


def test_geometric_series():
    t = TruncSeries.param(1, 0, 5)
    inv = (TruncSeries.constant(1, 1, 5) - t).inverse()
    assert inv == TruncSeries(1, 5, {(k,): 1 for k in range(6)})


@given(series(), series())
def test_product_rule_and_order_drop(a, b):
    d = (a * b).deriv(0)
    assert d.order == a.order - 1
    assert d == a.deriv(0) * b + a * b.deriv(0)


def test_order_zero_derivative_is_an_error():
    with pytest.raises(PrecisionError):
        TruncSeries.constant(2, 1, 0).deriv(0)


@given(series())
def test_integrate_then_derive(a):
    assert a.integrate(1).deriv(1) == a


@given(series(), series(max_terms=3), series(max_terms=3))
def test_compose_is_a_ring_map(a, u, v):
    zero_const = lambda s: s - TruncSeries.constant(s.nvars, s.constant_term(), s.order)
    imgs = [zero_const(u), zero_const(v)]
    assert (a * a).compose(imgs) == a.compose(imgs) * a.compose(imgs)


def test_compose_rejects_constant_images():
    with pytest.raises(PrecisionError):
        TruncSeries.param(1, 0, 2).compose([TruncSeries.constant(1, 1, 2)])


def test_truncation_rules():
    s = TruncSeries(1, 2, {(0,): 1, (2,): 3, (3,): 7})
    assert (3,) not in s.terms
    with pytest.raises(PrecisionError):
        s.truncate(3)
    assert s.truncate(1) == TruncSeries(1, 1, {(0,): 1})


# -- linear algebra ------------------------------------------------------------


small_mats = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n)
)


def to_sympy_matrix(rows):
    return sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in r] for r in rows])


@given(small_mats)
def test_det_and_rank_match_sympy(rows):
    M = QMatrix(rows)
    S = to_sympy_matrix(rows)
    d = S.det()
    assert M.det() == QQ(int(d.p), int(d.q))
    assert bareiss_det(rows) == M.det()
    assert M.rank() == S.rank()


@given(small_mats)
def test_inverse_or_kernel(rows):
    M = QMatrix(rows)
    n = M.nrows
    if M.det():
        assert M @ M.inverse() == QMatrix.identity(n)
    else:
        with pytest.raises(LinearAlgebraError):
            M.inverse()
        ker = M.kernel()
        assert ker and all(not any(x for x in (M @ QMatrix.column(v)).col(0)) for v in ker)
        assert len(ker) == n - M.rank()


@given(small_mats, st.lists(rationals, min_size=4, max_size=4))
def test_linear_solve_particular_solution(rows, x):
    M = QMatrix(rows)
    x = x[: M.ncols]
    b = M @ QMatrix.column(x)
    sol = linear_solve(M, b)
    assert M @ sol.particular == b
    assert sol.nullity == M.ncols - M.rank()


def test_inconsistent_system():
    M = QMatrix([[1, 1], [2, 2]])
    with pytest.raises(NoSolution):
        linear_solve(M, QMatrix.column([1, 3]))


def test_rank_of_vectors():
    assert rank_of([[1, 2, 3], [2, 4, 6], [0, 1, frac("1/2")]]) == 2
    assert rank_of([]) == 0


def test_series_matrix_inverse():
    t = TruncSeries.param(1, 0, 4)
    one = TruncSeries.constant(1, 1, 4)
    A = [[one, t], [t * t, one + t]]
    Ainv = sm.inverse(A)
    assert sm.equal(sm.matmul(A, Ainv), sm.identity(2, 1, 4))


@given(nonzero_rationals)
def test_scalar_matrix_inverse(c):
    M = QMatrix.identity(3).scale(c)
    assert M.inverse() == QMatrix.identity(3).scale(1 / c)
