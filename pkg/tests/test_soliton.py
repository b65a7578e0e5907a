from fractions import Fraction

import numpy as np
import pytest

from negkdv.soliton import (FLOWS, Grid, HypExpr, balance, fornberg_weights, hyp_substitute,
                            residual_numeric, soliton_report, solve_params, strip_common)


def test_hyp_identities():
    h = HypExpr.from_raw([(1, (0, 0), 2)])
    assert h == HypExpr.from_raw([(1, (0, 0), 0), (-1, (2, 0), 0)])
    S = HypExpr.from_raw([(1, (1, 0), 0)])
    assert S.diff() == HypExpr.from_raw([(-1, (1, 0), 1)])


def test_ansatz_with_zero_amplitude():
    assert HypExpr.ansatz().subs({"A": 0}).is_zero()


def test_k3_reduced_shape():
    st = strip_common(hyp_substitute("eq7_1"))
    assert st.expr.render() == "(-3*A^3)*sech^(3*n) + (-2*n*p - 2*p)*sech^(2)"


@pytest.mark.parametrize("flow,n,p", [("k2", 1, "-1/2*A^2"), ("k3", Fraction(2, 3), "-9/10*A^3"),
                                      ("k4", Fraction(1, 2), "-4/3*A^4")])
def test_balance_and_speed(flow, n, p):
    h = hyp_substitute(FLOWS[flow][0])
    assert balance(h) == [n]
    s = solve_params(h, n)
    assert s.family["p"] == p and s.family["A"] == "free" and s.verified


def test_fuchssteiner_amplitude():
    h = hyp_substitute(FLOWS["fuchs"][0])
    assert balance(h) == [2]
    s = solve_params(h, Fraction(2))
    assert s.family == {"A": 2, "p": "free"} and s.verified


@pytest.mark.parametrize("flow", ["k2", "k3", "k4", "fuchs"])
def test_reports_pass(flow):
    assert soliton_report(flow).ok


def test_fornberg_weights_exact():
    assert fornberg_weights(2, [-1, 0, 1]) == [1, -2, 1]
    assert fornberg_weights(1, [-2, -1, 0, 1, 2]) == [Fraction(1, 12), Fraction(-2, 3), 0,
                                                      Fraction(2, 3), Fraction(-1, 12)]


@pytest.mark.parametrize("flow", ["k2", "k3", "k4", "fuchs"])
@pytest.mark.parametrize("A", [1, 3])
def test_analytic_residual(flow, A):
    eq = FLOWS[flow][0]
    h = hyp_substitute(eq)
    sol = solve_params(h, balance(h)[0])
    assert residual_numeric(eq, sol, A, p_value=1)["max_residual"] <= 1e-10


def test_zero_solution_residual():
    assert residual_numeric("eq7_1", None, 0, p_value=1)["max_residual"] == 0


def test_finite_difference_order():
    r = residual_numeric("eq101", {"A": 2, "p": 1, "n": 2}, 2, Grid(steps=201), "finite_difference")
    assert abs(r["order"] - 2) <= 0.3
    assert r["errors"][1] < r["errors"][0]


def test_unknown_method():
    with pytest.raises(ValueError):
        residual_numeric("eq7_1", {"A": 1, "p": 1, "n": 1}, 1, method="spectral")
