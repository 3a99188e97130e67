"""Shared hypothesis strategies for exact polynomial and series tests."""

from fractions import Fraction

from hypothesis import settings, strategies as st

from gepner.exactalg.poly import MultiPoly
from gepner.exactalg.rational import QQ
from gepner.exactalg.series import TruncSeries

settings.register_profile("exact", deadline=None, max_examples=40)
settings.load_profile("exact")

VARS = ("x", "y", "z")

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6).map(lambda f: QQ(f.numerator, f.denominator))
nonzero_rationals = rationals.filter(bool)


def exponents(nvars, max_deg=3):
    return st.tuples(*[st.integers(0, max_deg)] * nvars)


@st.composite
def polys(draw, vars=VARS, max_terms=4, max_deg=3):
    terms = draw(st.dictionaries(exponents(len(vars), max_deg), rationals, max_size=max_terms))
    return MultiPoly(vars, terms)


@st.composite
def series(draw, nvars=2, order=3, max_terms=5):
    terms = draw(st.dictionaries(exponents(nvars, order), rationals, max_size=max_terms))
    return TruncSeries(nvars, order, terms)


@st.composite
def units(draw, nvars=2, order=3):
    s = draw(series(nvars, order))
    c = draw(nonzero_rationals)
    return s - TruncSeries.constant(nvars, s.constant_term(), order) + TruncSeries.constant(nvars, c, order)


def frac(text):
    f = Fraction(text)
    return QQ(f.numerator, f.denominator)
