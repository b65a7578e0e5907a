"""Randomized algebraic laws, 1000 cases each.

Collected through the acceptance suite (criterion 11).
"""
import random
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import coeffs, polys
from negkdv.diffalg import DiffPoly, HillIdeal, euler_operator, reduce_hill, var
from negkdv.identities import REGISTRY
from negkdv.parser import parse, parse_expr, render
from negkdv.soliton import HypExpr

N = 1000
P = polys()


@settings(max_examples=N)
@given(P, P, P)
def ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == DiffPoly()
    assert a * DiffPoly.constant(1) == a


@settings(max_examples=N)
@given(P, P)
def leibniz_rule(a, b):
    assert (a * b).dx() == a.dx() * b + a * b.dx()
    assert (a * b).dt() == a.dt() * b + a * b.dt()
    assert (a + b).dx() == a.dx() + b.dx()


@settings(max_examples=N)
@given(P)
def dx_dt_commute(a):
    assert a.dx().dt() == a.dt().dx()
    assert a.dx(2).dt() == a.dt().dx(2)


@settings(max_examples=N)
@given(polys(names=("u",), max_t=0, max_x=3))
def euler_kills_total_derivatives(a):
    assert euler_operator(a.dx(), "u").is_zero()


hill = polys(names=("psi1", "psi2", "u"), max_t=0, max_x=5, max_terms=3)


@settings(max_examples=N)
@given(hill, st.integers(0, 2**32))
def hill_reduction_confluent(a, seed):
    ideal = HillIdeal.pair()
    red = reduce_hill(a, ideal)
    assert reduce_hill(a, ideal, random.Random(seed)) == red
    assert reduce_hill(red, ideal) == red


@settings(max_examples=N)
@given(hill, hill, st.integers(0, 3))
def hill_ideal_members_reduce_to_zero(a, m, k):
    gen = (var("psi1", 0, 2) + var("u") * var("psi1")).dx(k)
    ideal = HillIdeal.pair()
    assert reduce_hill(a + m * gen, ideal) == reduce_hill(a, ideal)


def parser_roundtrip_registry():
    for entry in REGISTRY.values():
        tree = parse(entry.text)
        assert parse(render(tree)) == tree
        again = parse_expr(render(tree))
        assert again == entry.form


_leaves = st.one_of(
    st.sampled_from(["u", "u_x", "u_txx", "psi", "psi_xx", "w", "w_vvv", "mu", "A"]),
    st.integers(0, 9).map(str),
    st.builds(lambda a, b: f"{a}/{b}", st.integers(0, 9), st.integers(1, 9)),
)


def _combine(children):
    return st.one_of(
        st.builds(lambda a, b, op: f"({a}){op}({b})", children, children, st.sampled_from("+-*")),
        st.builds(lambda a, k: f"({a})^{k}", children, st.integers(0, 3)),
        st.builds(lambda a: f"-({a})", children),
        st.builds(lambda a: f"D({a}, x)", children),
    )


exprs = st.recursive(_leaves, _combine, max_leaves=8)


@settings(max_examples=N)
@given(exprs)
def parser_roundtrip_random(text):
    tree = parse(text)
    assert parse(render(tree)) == tree


hyp_terms = st.lists(st.tuples(st.integers(-4, 4), st.tuples(st.integers(0, 6), st.just(0)),
                               st.integers(0, 4)), max_size=5)


@settings(max_examples=N)
@given(hyp_terms, st.floats(-3, 3))
def hyp_normalization_and_derivative(raw, xi):
    h = HypExpr.from_raw([(c, e, t) for c, e, t in raw])
    # normal form agrees with the direct sum of c sech^e tanh^t
    S, T = 1 / np.cosh(xi), np.tanh(xi)
    direct = sum(c * S ** e[0] * T ** t for c, e, t in raw)
    assert abs(h.evaluate(xi, {}) - direct) <= 1e-9 * (1 + abs(direct))
    assert all(t in (0, 1) for _, _, t in h.terms)
    # derivative rule against a central difference
    eps = 1e-5
    fd = (h.evaluate(xi + eps, {}) - h.evaluate(xi - eps, {})) / (2 * eps)
    assert abs(h.diff().evaluate(xi, {}) - fd) <= 1e-5 * (1 + abs(fd))


@settings(max_examples=N)
@given(P, coeffs)
def scale_is_multiplication(a, c):
    assert a.scale(c) == a * DiffPoly.constant(c)
    assert a.scale(Fraction(0)).is_zero()


SUITES = {
    "ring_laws": ring_laws,
    "leibniz_rule": leibniz_rule,
    "dx_dt_commute": dx_dt_commute,
    "euler_kills_total_derivatives": euler_kills_total_derivatives,
    "hill_reduction_confluent": hill_reduction_confluent,
    "hill_ideal_members_reduce_to_zero": hill_ideal_members_reduce_to_zero,
    "parser_roundtrip_registry": parser_roundtrip_registry,
    "parser_roundtrip_random": parser_roundtrip_random,
    "hyp_normalization_and_derivative": hyp_normalization_and_derivative,
    "scale_is_multiplication": scale_is_multiplication,
}
