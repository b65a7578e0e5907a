from fractions import Fraction

import pytest

from negkdv.diffalg import DiffPoly, HillIdeal, reduce_hill, var
from negkdv.operators import (LinearDiffOp, coadjoint_density, coadjoint_pairing_check,
                              commutator_action, commutator_kernel_check, delta_op,
                              illustration_check, lie_derivative, rescale_check_delta5,
                              s_decomposition, self_adjoint_check, stabilizer_first_integral_check,
                              stabilizer_residual, sym_power_basis_check, hamiltonian_ops_check,
                              kupershmidt_check)
from negkdv.parser import parse_expr as P

u = var("u")
D = LinearDiffOp.d


def test_delta_examples():
    assert delta_op(2) == LinearDiffOp({2: 1, 0: u})
    assert delta_op(4) == LinearDiffOp({4: 1, 2: 10 * u, 1: 10 * u.dx(), 0: P("9*u^2 + 3*u_xx")})
    assert delta_op(5, "rescaled") == LinearDiffOp(
        {5: 1, 3: 10 * u, 2: 15 * u.dx(), 1: P("9*u_xx + 16*u^2"), 0: P("2*u_xxx + 16*u*u_x")})


def test_delta_rejects_unknown_order():
    with pytest.raises(ValueError):
        delta_op(7)


def test_apply_examples():
    assert reduce_hill(delta_op(2).apply(var("psi")), HillIdeal.single()).is_zero()
    pair = HillIdeal.pair()
    assert reduce_hill(delta_op(3).apply(var("psi1") * var("psi2")), pair).is_zero()
    assert reduce_hill(delta_op(4).apply(var("psi1") ** 2 * var("psi2")), pair).is_zero()


def test_compose_examples():
    assert D() @ D() == D(2)
    assert D() @ LinearDiffOp.mult(u) == LinearDiffOp({1: u, 0: u.dx()})
    lam = Fraction(3, 2)
    f = var("f")
    assert lie_derivative("f", lam) @ D(2) == LinearDiffOp({3: f, 2: f.dx().scale(-lam)})


def test_composition_is_associative_on_samples():
    A, B, C = delta_op(3), lie_derivative("f", 2), LinearDiffOp({1: var("g"), 0: u})
    assert (A @ B) @ C == A @ (B @ C)
    s = var("phi")
    assert (A @ B).apply(s) == A.apply(B.apply(s))


def test_commutator_n2_is_multiplication():
    c = commutator_action(2)
    assert c.order == 0
    assert c.coeff(0) == P("1/2*f_xxx + 2*u*f_x + u_x*f")


def test_commutator_n3_structure():
    S = stabilizer_residual()
    c = commutator_action(3)
    # derived: D_x(S) + 2 S D  (the multiplier of S D differs from the displayed one)
    assert c == LinearDiffOp({0: S.dx(), 1: 2 * S})
    assert s_decomposition(c).in_ideal


@pytest.mark.parametrize("n", [3, 4])
def test_illustration_reports(n):
    r = illustration_check(n)
    assert r.details["in_stabilizer_ideal"]
    assert r.status == "discrepancy"
    assert r.details["differences"]


def test_illustration_n4_multipliers():
    r = illustration_check(4)
    assert r.details["derived_multipliers"] == {"0": ["9*u", "0", "3/2"], "1": ["0", "5"], "2": ["5"]}
    assert r.details["printed_multipliers"] == {"0": ["6*u", "0", "1"], "1": ["0", "5"], "2": ["1"]}


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_commutator_vanishes_on_stabilizer(n):
    assert commutator_kernel_check(n).ok


def test_coadjoint():
    assert coadjoint_density() == P("1/2*mu*f_xxx + 2*f_x*u + f*u_x")
    r = coadjoint_pairing_check()
    assert r.status == "discrepancy"
    assert r.details["derived_pairing_exact"] and r.details["mu_part_exact"]
    assert not r.details["printed_pairing_exact"]
    diff = r.details["differing_coefficients"]
    assert len(diff) == 1 and diff[0]["derived"] == 1 and diff[0]["printed"] == 2


def test_stabilizer_examples():
    assert stabilizer_first_integral_check().ok
    f = var("f")
    mutated = f * f.dx(2) - f.dx() ** 2 * Fraction(1, 2)
    r = stabilizer_first_integral_check(mutated)
    assert r.status == "fail" and r.witness


@pytest.mark.parametrize("n", [3, 4, 5])
def test_sym_power_span(n):
    r = sym_power_basis_check(n)
    assert r.ok and len(r.details["products"]) == n


def test_sym_power_seeded_confluence():
    import random
    assert sym_power_basis_check(4, random.Random(3)).ok


def test_hamiltonian_kupershmidt_rescale():
    assert hamiltonian_ops_check().ok
    assert kupershmidt_check().ok
    r = rescale_check_delta5()
    assert r.ok
    assert r.details["coefficients"]["3"]["scaled"] == "10*u"


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_adjointness(n):
    assert self_adjoint_check(n).ok
