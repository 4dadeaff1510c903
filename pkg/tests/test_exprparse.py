"""Expression grammar and the print -> parse round trip."""

import random
from fractions import Fraction

import pytest

from ghl.exprparse import (ExprSyntaxError, UndeclaredParameterError,
                           parse_expression, to_linear_combination, to_scalar)
from ghl.scalars import ExactDomain, Polynomial, RationalFunction

DOM = ExactDomain(("alpha", "beta", "r", "v", "t", "a", "b"))


def val(text):
    return to_scalar(parse_expression(text), DOM)


def test_simple_tree_value():
    got = val("alpha*(t-1)/2")
    expected = RationalFunction.param("alpha") * (RationalFunction.param("t") - 1) / 2
    assert got.eq(expected)


def test_kodaira_scal_expression_evaluates():
    e = val("-(t-1)*(a^2*r^2+b^2*r^2+v^2)^3/(r^4*v^4)")
    assert e.evaluate({"a": 1, "b": 0, "r": 1, "v": 1, "t": 0}) == 8


def test_negative_exponent_rejected():
    with pytest.raises(ExprSyntaxError):
        parse_expression("alpha^-1")


def test_unary_minus_binds_inside_power():
    # grammar: base := ... | '-' base, so -a^2 is (-a)^2
    assert val("-alpha^2").eq(RationalFunction.param("alpha") ** 2)
    assert val("-(alpha^2)").eq(-(RationalFunction.param("alpha") ** 2))


def test_syntax_error_reports_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse_expression("alpha + @")
    assert err.value.offset == 8


def test_undeclared_parameter_named():
    with pytest.raises(UndeclaredParameterError, match="gamma"):
        val("gamma + 1")


def test_left_associativity():
    assert val("8/4/2").eq(RationalFunction.const(1))
    assert val("8-4-2").eq(RationalFunction.const(2))


def test_whitespace_insensitive():
    assert val("  alpha *(t - 1)/ 2 ").eq(val("alpha*(t-1)/2"))


def test_linear_combination():
    vec = to_linear_combination(parse_expression("alpha*e4 + beta*e5 - e0/2"), DOM, 6)
    assert vec[4].eq(RationalFunction.param("alpha"))
    assert vec[5].eq(RationalFunction.param("beta"))
    assert vec[0].eq(RationalFunction.const(Fraction(-1, 2)))
    assert all(vec[i].is_zero() for i in (1, 2, 3))


def test_linear_combination_rejections():
    with pytest.raises(ExprSyntaxError):
        to_linear_combination(parse_expression("e0*e1"), DOM, 4)
    with pytest.raises(ExprSyntaxError):
        to_linear_combination(parse_expression("e9"), DOM, 4)
    with pytest.raises(ExprSyntaxError):
        to_linear_combination(parse_expression("alpha"), DOM, 4)  # scalar part
    with pytest.raises(ExprSyntaxError):
        to_linear_combination(parse_expression("1/e1"), DOM, 4)


def _random_ratfun(rng: random.Random) -> RationalFunction:
    names = ("alpha", "r", "t")

    def poly():
        p = Polynomial.const(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
        for name in names:
            for power in (1, 2, 3):
                if rng.random() < 0.35:
                    c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                    p = p + Polynomial.variable(name) ** power * c
        return p
    num = poly()
    den = poly()
    if den.is_zero():
        den = Polynomial.const(1)
    return RationalFunction(num, den)


def test_print_parse_round_trip_100_random():
    rng = random.Random(20260810)
    dom = ExactDomain(("alpha", "r", "t"))
    for _ in range(100):
        f = _random_ratfun(rng)
        text = f.text()
        back = to_scalar(parse_expression(text), dom)
        assert back.eq(f), text
