import pytest

from negkdv.diffalg import RationalDiffExpr, var
from negkdv.parser import ParseError, parse, parse_expr, render


def test_derivative_operator():
    psi = var("psi")
    assert parse_expr("D(psi^2, x)") == psi.scale(2) * var("psi", 0, 1)
    assert parse_expr("D(u, x, t)") == var("u", 1, 1)


def test_quotient_with_common_denominator():
    e = parse_expr("u_txx/u_x + 4*u*u_t/u_x")
    assert isinstance(e, RationalDiffExpr)
    assert e.den == var("u", 0, 1)
    assert e.num == parse_expr("u_txx + 4*u*u_t")


def test_negative_exponent_position():
    with pytest.raises(ParseError) as err:
        parse("u ^ -1")
    assert err.value.pos == 4


@pytest.mark.parametrize("text", ["u +", "(u", "q_x", "u_y", "mu_x", "u_tv", "3 3"])
def test_rejects(text):
    with pytest.raises(ParseError):
        parse_expr(text)


def test_v_is_x_like():
    assert parse_expr("w_vvv") == var("w", 0, 3)


def test_constant_denominator_lowers_to_polynomial():
    assert parse_expr("u/2") == var("u").scale(__import__("fractions").Fraction(1, 2))


def test_render_roundtrip_precedence():
    for text in ["-(u - psi)^2", "a - (s - c)", "u/(psi*w)", "-u^2", "D(u*u_x, x)"]:
        tree = parse(text)
        assert parse(render(tree)) == tree
