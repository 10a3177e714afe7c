from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from pssm.errors import DegenerateSubstitution, DivisionByZero, ParseError
from pssm.exact import (Polynomial, RationalFunction, parse_polynomial, parse_ratfunc,
                        poly_substitute, ratfunc_arith, ratfunc_equal, symbol_key)

AC7 = "AC7 property suites"
SYMS = ("a_0", "a_1", "nu")
POINT = {"a_0": Fraction(3, 2), "a_1": Fraction(-2), "nu": Fraction(5, 7)}


def P(text):
    return parse_polynomial(text)


def R(text):
    return parse_ratfunc(text)


fractions = st.fractions(min_value=-6, max_value=6, max_denominator=4)
monomials = st.tuples(*[st.integers(0, 2)] * len(SYMS)).map(
    lambda es: tuple((s, e) for s, e in zip(SYMS, es) if e))
polys = st.dictionaries(monomials, fractions, max_size=4).map(Polynomial)
nonzero_polys = polys.filter(lambda p: not p.is_zero())
ratfuncs = st.builds(RationalFunction, polys, nonzero_polys)


# ---------------------------------------------------------------- examples

def test_difference_of_squares():
    assert P("x + 1") * P("x - 1") == P("x^2 - 1")


def test_monomial_product_and_cancellation():
    assert P("a_0") * P("a_1") == P("a_0*a_1")
    s = P("a_0^2*a_1 + nu*a_1^2") + P("-a_0^2*a_1")
    assert s == P("nu*a_1^2")
    assert len(s) == 1


def test_substitution_zeroes_known_solutions():
    p = P("a_01*a_11 - 2*a_02*a_10")
    out = poly_substitute(p, {"a_02": R("a_01*a_10/(6*nu)"), "a_11": R("a_10^2/(3*nu)")})
    assert out.is_zero()
    assert poly_substitute(P("x"), {}) == R("x")
    assert poly_substitute(P("2*nu*a_2 - a_0*a_1"), {"a_2": R("a_0*a_1/(2*nu)")}).is_zero()


def test_substitution_with_vanishing_denominator():
    with pytest.raises(DegenerateSubstitution):
        poly_substitute(P("x"), {"x": RationalFunction._raw(P("1"), P("y - y"))})


def test_ratfunc_arithmetic_examples():
    assert R("a_1^2/(6*nu)") * R("1") == R("a_1^2/(6*nu)")
    assert ratfunc_equal(R("a_0*a_1/(2*nu)") / R("a_0"), R("a_1/(2*nu)"))
    a2, a3 = R("a_0*a_1/(2*nu)"), R("(a_0^2*a_1 + nu*a_1^2)/(6*nu^2)")
    a4 = (R("a_1") * a2 + R("a_0") * a3) / R("4*nu")
    assert ratfunc_equal(a4, R("(a_0^3*a_1 + 4*nu*a_0*a_1^2)/(24*nu^3)"))
    assert ratfunc_arith(1, 2, "div") == Fraction(1, 2)


def test_ratfunc_equal_examples():
    assert ratfunc_equal(R("a_0*a_1/(2*nu)"), R("(2*a_0*a_1)/(4*nu)"))
    assert not ratfunc_equal(R("a_1^2/(6*nu)"), R("a_1^2/(6*nu^2)"))
    a5 = "(a_0^4*a_1 + 11*nu*a_0^2*a_1^2 + 4*nu^2*a_1^3)/(120*nu^4)"
    assert ratfunc_equal(R(a5), R(R(a5).to_text()))


def test_canonical_form():
    r = R("(2*x)/(-4*y)")
    assert r.to_text() == "-x/(2*y)"
    assert r.den.leading_coefficient() > 0
    assert all(c.denominator == 1 for _, c in r.num.items())
    assert R("(x^2 - 1)/(x - 1)").is_polynomial()
    assert R("0/(x + 1)").den == Polynomial.constant(1)


def test_display_order():
    assert P("a_0 + a_1^2 + 1").to_text() == "a_1^2 + a_0 + 1"
    assert sorted(["a_10", "a_2", "a_1"], key=symbol_key) == ["a_1", "a_2", "a_10"]
    assert R("(a_0^3*a_1 + 4*nu*a_0*a_1^2)/(24*nu^3)").to_text() == \
        "(a_0^3*a_1 + 4*nu*a_0*a_1^2)/(24*nu^3)"


def test_exact_div_and_sqrt():
    assert P("x^2 - y^2").exact_div(P("x + y")) == P("x - y")
    assert P("x^2 + 1").exact_div(P("x + 1")) is None
    assert P("4*a^2 + 4*a*b + b^2").sqrt() == P("2*a + b")
    assert P("2*a^2").sqrt() is None
    with pytest.raises(DivisionByZero):
        P("x").exact_div(P("0"))


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        R("x") / R("y - y")
    with pytest.raises(ParseError):
        R("x/0")


@pytest.mark.parametrize("text, column", [("x + ", 4), ("2 $ x", 3), ("(x + 1", 7), ("x^y", 3)])
def test_parse_errors_report_column(text, column):
    with pytest.raises(ParseError) as info:
        R(text)
    assert info.value.column == column


def test_rejects_floats():
    with pytest.raises(TypeError):
        Polynomial.constant(0.5)


# ---------------------------------------------------------------- properties

@pytest.mark.criterion(AC7)
@settings(max_examples=1000, deadline=None)
@given(polys, polys, polys)
def test_polynomial_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == Polynomial()
    assert p * Polynomial.constant(1) == p


@pytest.mark.criterion(AC7)
@settings(max_examples=1000, deadline=None)
@given(polys, polys)
def test_polynomial_evaluation_is_a_homomorphism(p, q):
    # plain Fraction arithmetic at a point is the oracle
    assert (p + q).evaluate(POINT) == p.evaluate(POINT) + q.evaluate(POINT)
    assert (p * q).evaluate(POINT) == p.evaluate(POINT) * q.evaluate(POINT)


@pytest.mark.criterion(AC7)
@settings(max_examples=300, deadline=None)
@given(ratfuncs, ratfuncs, ratfuncs)
def test_ratfunc_field_operations(a, b, c):
    assume(a.den.evaluate(POINT) and b.den.evaluate(POINT) and c.den.evaluate(POINT))
    va, vb, vc = (x.evaluate(POINT) for x in (a, b, c))
    assert (a + b).evaluate(POINT) == va + vb
    assert (a * b - c).evaluate(POINT) == va * vb - vc
    assert ratfunc_equal(a * (b + c), a * b + a * c)
    if not b.is_zero():
        assert ratfunc_equal((a / b) * b, a)


@pytest.mark.criterion(AC7)
@settings(max_examples=300, deadline=None)
@given(ratfuncs, nonzero_polys)
def test_ratfunc_equal_ignores_common_factors(a, f):
    scaled = RationalFunction._raw(a.num * f, a.den * f)
    assert ratfunc_equal(a, scaled)
    assert ratfunc_equal(scaled, a)
    assert a == scaled


@pytest.mark.criterion(AC7)
@settings(max_examples=300, deadline=None)
@given(ratfuncs)
def test_ratfunc_text_round_trip(a):
    back = parse_ratfunc(a.to_text())
    assert ratfunc_equal(back, a)
    assert back.to_text() == a.to_text()


@pytest.mark.criterion(AC7)
@settings(max_examples=300, deadline=None)
@given(polys)
def test_square_root_of_a_square(p):
    root = (p * p).sqrt()
    assert root is not None
    assert root * root == p * p


@pytest.mark.criterion(AC7)
@settings(max_examples=300, deadline=None)
@given(polys, nonzero_polys)
def test_exact_division_recovers_the_factor(p, q):
    assert (p * q).exact_div(q) == p
