import cmath
from fractions import Fraction

import pytest

from negkdv.painleve import (UniPoly, all_roots, leading_orders, ode_from_id, painleve_report,
                             rational_roots, resonance_polynomial, resonances)
from negkdv.parser import parse_expr


def _close(a, b, tol=1e-9):
    return abs(complex(a) - complex(b)) <= tol * (1 + abs(complex(b)))


def test_rational_roots_and_deflation():
    roots, rest = rational_roots(UniPoly([6, -5, 1]))
    assert sorted(r for r, _ in roots) == [2, 3] and rest.degree == 0
    roots = all_roots(UniPoly([-2, 0, 1]))
    assert sorted(complex(r).real for r, _ in roots) == pytest.approx([-2 ** 0.5, 2 ** 0.5], abs=1e-12)


def test_multiplicity():
    roots, _ = rational_roots(UniPoly([0, 0, -1, 1]))
    assert dict(roots) == {0: 2, 1: 1}


def test_order4_wave_leading_order():
    (lo,) = leading_orders(ode_from_id("eq102"))
    assert lo.p == -2
    assert lo.coeff_poly.coeffs == (0, 0, -1440, -2136, -816, -54)
    assert dict(lo.roots) == {0: 2, -12: 1, -2: 1, Fraction(-10, 9): 1}


def test_order4_wave_resonances():
    ode = ode_from_id("eq102")
    r = resonances(ode, Fraction(-2), -2)
    assert dict(r.resonances) == {-2: 1, -1: 1, 6: 1}
    assert r.classification == "deficient" and r.resonance_sum == 3
    poly = resonance_polynomial(ode, Fraction(-2), -2)
    assert [c / -160 for c in poly.coeffs] == [-12, -16, -3, 1]
    r = resonances(ode, Fraction(-2), Fraction(-10, 9))
    assert dict(r.resonances) == {-1: 1, 2: 1, Fraction(10, 3): 1, Fraction(14, 3): 1, 7: 1}
    assert r.series_denominator == 3 and r.classification == "full"
    r = resonances(ode, Fraction(-2), -12)
    vals = [v for v, _ in r.resonances]
    s = 337 ** 0.5
    for want in (-1, 2, 14, (1 - s) / 2, (1 + s) / 2):
        assert any(_close(v, want) for v in vals)
    assert r.classification == "irrational"


def test_order5_wave_leading_order_and_degenerate_branch():
    (lo,) = leading_orders(ode_from_id("eq105"))
    assert lo.p == -2
    exact = {r: m for r, m in lo.roots if isinstance(r, (int, Fraction))}
    assert exact == {Fraction(-3, 4): 1, 0: 2}
    z = Fraction(3, 76) * (-6 + 1j * cmath.sqrt(154))
    cx = [r for r, _ in lo.roots if isinstance(r, complex)]
    assert any(_close(r, z) for r in cx) and any(_close(r, z.conjugate()) for r in cx)
    r = resonances(ode_from_id("eq105"), Fraction(-2), Fraction(-3, 4))
    assert r.res_poly.degree == 4
    assert dict(r.resonances) == {-2: 1, -1: 1, 4: 1, 6: 1}


def test_single_term_has_no_balance():
    assert leading_orders(parse_expr("w_xx")) == []


def test_reports():
    r = painleve_report("eq102")
    assert r.status == "discrepancy"
    assert r.details["series_step"] == {"derived": Fraction(1, 3), "printed": Fraction(1, 9)}
    assert r.details["coefficient_vs_printed"]["factor"] == 1
    r = painleve_report("eq105")
    assert r.ok
    assert r.details["verdict"] == "no branch has a full set of acceptable resonances"


def test_formal_constants_rejected():
    with pytest.raises(ValueError):
        leading_orders(parse_expr("c*w_xx + w^2"))
