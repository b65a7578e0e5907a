from fractions import Fraction

import pytest

from negkdv.identities import REGISTRY, cleared_numerator, expand_cleared
from negkdv.parser import parse_expr as P
from negkdv.symmetry import (WeightSystem, check_homogeneous, equivariance_check,
                             family_contains, find_scaling_weights, symmetry_reports,
                             t_degree_profile)

KDV = WeightSystem({"x": 1, "t": 0}, {"u": -2})


def test_homogeneous_examples():
    r = check_homogeneous(cleared_numerator("eq101"), KDV)
    assert r.holds and r.weight == -10
    r = check_homogeneous(cleared_numerator("eq102"), WeightSystem({"v": 1}, {"w": -2}))
    assert r.holds and r.weight == -11
    r = check_homogeneous(P("u^2 + u_x"), KDV)
    assert not r.holds and r.mismatch


def test_unassigned_variable():
    with pytest.raises(KeyError):
        check_homogeneous(P("u*psi"), KDV)


@pytest.mark.parametrize("r", [Fraction(3), Fraction(-1, 2)])
def test_verdict_invariant_under_rescaling(r):
    for p in (cleared_numerator("eq101"), P("u^2 + u_x")):
        assert check_homogeneous(p, KDV).holds == check_homogeneous(p, KDV.scaled(r)).holds


def test_family_fuchssteiner():
    fam = find_scaling_weights(cleared_numerator("eq1b"))
    assert family_contains(fam, KDV)
    assert family_contains(fam, WeightSystem({"x": 1, "t": 5}, {"u": -2}))


def test_family_order4_wave():
    fam = find_scaling_weights(cleared_numerator("eq102"), "v")
    assert len(fam) == 1 and fam[0].to_dict() == {"v": 1, "w": -2}
    assert not family_contains(fam, WeightSystem({"v": 2}, {"w": -3}))


def test_single_monomial_family_is_everything():
    fam = find_scaling_weights(P("u"))
    assert family_contains(fam, WeightSystem({}, {"u": 7}))


def test_t_profiles():
    assert {(c, m) for _, c, m in t_degree_profile(cleared_numerator("eq101"))} == {(1, 1)}
    assert {(c, m) for _, c, m in t_degree_profile(expand_cleared(5))} == {(1, 1)}
    assert t_degree_profile(P("u_tt")) == [("u_tt", 1, 2)]


def test_equivariance():
    for lam in (Fraction(2), Fraction(3, 5)):
        assert equivariance_check(cleared_numerator("eq101"), KDV, lam)
    assert not equivariance_check(P("u^2 + u_x"), KDV)
    assert equivariance_check(P("u*u_x"), WeightSystem({"x": Fraction(1, 2)}, {"u": Fraction(-1, 3)}))


def test_registry_has_no_explicit_variables():
    for e in REGISTRY.values():
        form = e.form
        names = form.names() if hasattr(form, "names") else form.num.names() | form.den.names()
        assert not names & {"x", "t", "v"}


def test_report_statuses():
    rs = {r.check_id: r.status for r in symmetry_reports()}
    assert rs["symmetry.eq102.scaling"] == "discrepancy"
    assert all(s == "pass" for k, s in rs.items() if k != "symmetry.eq102.scaling")
    assert len(rs) == 7
