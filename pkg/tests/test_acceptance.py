"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records a PASS/FAIL line (printed, and repeated in the terminal
summary) before asserting.
"""
import cmath
import io
from fractions import Fraction

import pytest

from negkdv.cli import run_command
from negkdv.identities import (compare_with_reference, expand_cleared, literal_eq25b_travelling,
                               travelling_wave, verify_mapping)
from negkdv.operators import (hamiltonian_ops_check, illustration_check, kupershmidt_check,
                              rescale_check_delta5, stabilizer_first_integral_check,
                              sym_power_basis_check, coadjoint_pairing_check)
from negkdv.painleve import leading_orders, ode_from_id, resonances
from negkdv.soliton import FLOWS, Grid, balance, hyp_substitute, residual_numeric, solve_params
from negkdv.symmetry import symmetry_reports
from properties import SUITES


def test_criterion_01_span_lemmas(criterion):
    rs = [sym_power_basis_check(n) for n in (3, 4, 5)]
    counts = [len(r.details["products"]) for r in rs]
    ok = all(r.ok for r in rs) and counts == [3, 4, 5]
    criterion(1, ok, f"products checked {counts}")
    assert ok


def test_criterion_02_mapping_propositions(criterion):
    rs = [verify_mapping(n) for n in (3, 4, 5)]
    ok = all(r.ok for r in rs)
    criterion(2, ok, ", ".join(f"{r.check_id}={r.status}" for r in rs))
    assert ok


def test_criterion_03_stabilizer_first_integral(criterion):
    r = stabilizer_first_integral_check()
    criterion(3, r.ok, r.status)
    assert r.ok


def test_criterion_04_operator_suite(criterion):
    ill = {n: illustration_check(n) for n in (3, 4)}
    ham = hamiltonian_ops_check()
    sub = {
        "illustration_n3_matches": ill[3].status == "pass",
        "illustration_n4_matches": ill[4].status == "pass",
        "rescale_delta5": rescale_check_delta5().ok,
        "O2_kdv_flow": ham.details["subchecks"]["kdv_flow"],
        "O2_psi2_reduces": ham.details["subchecks"]["constraint_reduces"],
        "kupershmidt": kupershmidt_check().ok,
    }
    ok = all(sub.values())
    failed = [k for k, v in sub.items() if not v]
    note = "all clauses hold" if ok else f"failing clauses {failed}"
    if not ok:
        note += (f" (commutators lie in the S-ideal: "
                 f"{all(r.details['in_stabilizer_ideal'] for r in ill.values())}; "
                 f"multipliers n3 derived {ill[3].details['derived_multipliers']} "
                 f"vs displayed {ill[3].details['printed_multipliers']})")
    criterion(4, ok, note)
    assert ok


def test_criterion_05_coadjoint(criterion):
    r = coadjoint_pairing_check()
    code = run_command(["verify", "coadjoint"], out=io.BytesIO())
    ok = (r.details["derived_pairing_exact"] and r.status == "discrepancy"
          and len(r.details["differing_coefficients"]) == 1 and code == 3)
    criterion(5, ok, f"differing {r.details['differing_coefficients']}, exit {code}")
    assert ok


def _w6_only(rep):
    d = rep.details
    mons = ([x["monomial"] for x in d["only_in_derived"]] + [x["monomial"] for x in d["only_in_reference"]]
            + [x["monomial"] for x in d["differing"]])
    return bool(mons) and all("w_xxxxxx" in m for m in mons), mons


def test_criterion_06_expansions(criterion):
    c4 = expand_cleared(4)
    r101 = compare_with_reference(c4, "eq101", "cleared4")
    r102 = compare_with_reference(travelling_wave(c4), "eq102", "travelling4")
    readings = {
        "derived": compare_with_reference(travelling_wave(expand_cleared(5)), "eq105", "travelling5"),
        "literal": compare_with_reference(literal_eq25b_travelling(), "eq105", "literal25b"),
    }
    w6 = {k: _w6_only(r) for k, r in readings.items()}
    n5_ok = any(v[0] and readings[k].status == "discrepancy" for k, v in w6.items())
    ok = r101.ok and r102.ok and n5_ok
    note = (f"eq101 factor {r101.details['factor']}, eq102 factor {r102.details['factor']}; "
            + "; ".join(f"n=5 {k} reading differs in {v[1]}" for k, v in w6.items()))
    criterion(6, ok, note)
    assert ok


def _close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol


def _multiset_match(got, want, tol=1e-9):
    pool = [v for v, m in got for _ in range(m)]
    for w in want:
        hit = next((i for i, v in enumerate(pool) if _close(v, w, tol)), None)
        if hit is None:
            return False
        pool.pop(hit)
    return not pool


def test_criterion_07_painleve(criterion):
    e102 = ode_from_id("eq102")
    (lo,) = leading_orders(e102)
    sub = {"eq102_p": lo.p == -2,
           "eq102_roots": dict(lo.roots) == {0: 2, -12: 1, -2: 1, Fraction(-10, 9): 1}}
    r = resonances(e102, lo.p, Fraction(-2))
    sub["a=-2"] = dict(r.resonances) == {-2: 1, -1: 1, 6: 1}
    r = resonances(e102, lo.p, Fraction(-10, 9))
    sub["a=-10/9"] = dict(r.resonances) == {-1: 1, 2: 1, Fraction(10, 3): 1, Fraction(14, 3): 1, 7: 1}
    s = 337 ** 0.5
    r = resonances(e102, lo.p, Fraction(-12))
    sub["a=-12"] = _multiset_match(r.resonances, [-1, 2, 14, (1 - s) / 2, (1 + s) / 2])
    e105 = ode_from_id("eq105")
    (lo5,) = leading_orders(e105)
    exact = {v: m for v, m in lo5.roots if isinstance(v, (int, Fraction))}
    z = Fraction(3, 76) * (-6 + 1j * cmath.sqrt(154))
    cx = [(v, m) for v, m in lo5.roots if not isinstance(v, (int, Fraction))]
    sub["eq105_p"] = lo5.p == -2
    sub["eq105_exact_roots"] = exact == {Fraction(-3, 4): 1, 0: 2}
    sub["eq105_complex_pair"] = _multiset_match(cx, [z, z.conjugate()])
    r = resonances(e105, lo5.p, Fraction(-3, 4))
    sub["eq105_a=-3/4"] = r.res_poly.degree == 4 and dict(r.resonances) == {-2: 1, -1: 1, 4: 1, 6: 1}
    ok = all(sub.values())
    criterion(7, ok, "all clauses hold" if ok else f"failing {[k for k, v in sub.items() if not v]}")
    assert ok


def test_criterion_08_soliton_parameters(criterion):
    want = {"k3": (Fraction(2, 3), {"A": "free", "p": "-9/10*A^3"}),
            "k4": (Fraction(1, 2), {"A": "free", "p": "-4/3*A^4"}),
            "fuchs": (Fraction(2), {"A": 2, "p": "free"})}
    got = {}
    for flow, (n, fam) in want.items():
        h = hyp_substitute(FLOWS[flow][0])
        ns = balance(h)
        sol = solve_params(h, n) if ns == [n] else None
        got[flow] = (ns, sol is not None and sol.verified
                     and {k: sol.family[k] for k in ("A", "p")} == fam)
    ok = all(v[1] for v in got.values())
    criterion(8, ok, str({k: v[1] for k, v in got.items()}))
    assert ok


def test_criterion_09_residuals(criterion):
    worst = {}
    for flow in ("k2", "k3", "k4", "fuchs"):
        eq = FLOWS[flow][0]
        h = hyp_substitute(eq)
        sol = solve_params(h, balance(h)[0])
        worst[flow] = max(residual_numeric(eq, sol, A, Grid(), p_value=1)["max_residual"]
                          for A in (1, 2, 3))
    orders = {steps: residual_numeric("eq101", {"A": 2, "p": 1, "n": 2}, 2, Grid(steps=steps),
                                      "finite_difference")["order"]
              for steps in (101, 201)}
    ok = all(v <= 1e-10 for v in worst.values()) and all(abs(o - 2) <= 0.3 for o in orders.values())
    criterion(9, ok, f"analytic max {max(worst.values()):.2e}; FD orders "
              + ", ".join(f"{k} pts: {v:.3f}" for k, v in orders.items()))
    assert ok


def test_criterion_10_symmetry(criterion):
    rs = {r.check_id: r for r in symmetry_reports()}
    sub = {
        "eq1b_scaling": rs["symmetry.eq1b.scaling"].ok,
        "eq101_scaling": rs["symmetry.eq101.scaling"].ok,
        "eq101_profile": rs["symmetry.eq101.t_profile"].ok,
        "cleared5_profile": rs["symmetry.cleared5.t_profile"].ok,
        "eq102_family": rs["symmetry.eq102.scaling"].details["family"] == [{"v": 1, "w": -2}],
        "eq102_printed_flagged": rs["symmetry.eq102.scaling"].status == "discrepancy",
    }
    ok = all(sub.values())
    criterion(10, ok, "all clauses hold" if ok else f"failing {[k for k, v in sub.items() if not v]}")
    assert ok


@pytest.mark.parametrize("name", sorted(SUITES))
def test_criterion_11_property_suites(name, criterion):
    try:
        SUITES[name]()
        ok = True
    except AssertionError:
        ok = False
    criterion(11, ok, f"{name}")
    assert ok
