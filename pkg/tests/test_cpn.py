"""General towers: diagonal family, constraints, telescoping identities."""

import random

import pytest

from supercpn import (CP2FreeData, DiagonalGammaData, FermionicParameter,
                      GRat, SuperVector, assemble_tower_bundle, b_matrix,
                      bosonic_tower, build_cp2_special,
                      build_diagonal_solution, check_general_constraint,
                      ge_from_jets, ge_zero, jet_poly,
                      prop3_residuals)
from supercpn.errors import IndexOutOfRange, OrderMismatch
from supercpn.grassmann import eta_index
from supercpn.sampling import rand_base_point, rand_diagonal_data


def poly(h, *coeffs):
    return ge_from_jets(
        h.ctx_, {0: jet_poly(h.base_, *h.dims_, [GRat(c) for c in coeffs])},
        dims=h.dims_)


@pytest.fixture(scope="module")
def h8(ctx2, base):
    from conftest import make_helpers
    return make_helpers(ctx2, base, (8, 8))


def diag_data(h, n, eta_f_coeffs=(1, 1), eta_b=2, tower_deg=None):
    tower_deg = n - 1 if tower_deg is None else tower_deg
    eta = FermionicParameter(
        h.gen(eta_index(0)).gmul(poly(h, *eta_f_coeffs)),
        h.const(eta_b))
    psi0b = SuperVector([
        poly(h, *(1 if k == i else 0 for k in range(tower_deg + 1)))
        for i in range(n)])
    last = SuperVector([
        h.gen(eta_index(1)).gmul(poly(h, i, 1)) for i in range(n)])
    return DiagonalGammaData(n=n, eta=eta, psi0b=psi0b, psi_last_f=last)


def test_fermion_free_matches_bosonic_oracle(h8):
    data = diag_data(h8, 4)
    data = DiagonalGammaData(
        n=4, eta=FermionicParameter(h8.zero, h8.const(1)),
        psi0b=data.psi0b,
        psi_last_f=SuperVector([h8.zero] * 4))
    bundle = build_diagonal_solution(data)
    oracle = bosonic_tower(data.psi0b, 4)
    for p, q in zip(bundle.projectors, oracle.projectors):
        dims = (min(p.dims[0], q.dims[0]), min(p.dims[1], q.dims[1]))
        assert p.truncated(*dims) == q.truncated(*dims)


def test_diagonal_system_holds(h8):
    # eta psi_j - D+ psi_{j-1} = 0 directly, j = 1..n-1
    bundle = build_diagonal_solution(diag_data(h8, 4))
    eta = bundle.alpha_table[1][1]
    for j in range(1, 4):
        res = bundle.psis[j].lmul(eta) - bundle.psis[j - 1].super_derive("plus")
        assert res.is_zero(), f"system at j={j}"


def test_n3_matches_cp2_special_translation(ctx3, base):
    # with alpha_1 = beta_2 = eta the two constructions coincide
    from conftest import make_helpers
    h = make_helpers(ctx3, base, (7, 7))
    eta_f = h.gen(eta_index(0)).gmul(poly(h, 1, 2))
    eta_b = h.const(3)
    eta = FermionicParameter(eta_f, eta_b)
    psi0b = SuperVector([poly(h, 1), poly(h, 0, 1), poly(h, 0, 0, 1)])
    last = SuperVector([h.gen(eta_index(1)),
                        h.gen(eta_index(1)).gmul(poly(h, 0, 1)),
                        h.zero])
    diag = build_diagonal_solution(
        DiagonalGammaData(n=3, eta=eta, psi0b=psi0b, psi_last_f=last))

    zero = h.zero
    zpar = FermionicParameter(zero, zero)
    cp2_data = CP2FreeData(psi0b=psi0b, alpha=(zpar, eta),
                           beta=(zpar, zpar, eta), psi2f=last)
    special, checks = build_cp2_special(cp2_data)
    assert all(v == 0.0 for v in checks.values())
    for p, q in zip(diag.projectors, special.projectors):
        dims = (min(p.dims[0], q.dims[0]), min(p.dims[1], q.dims[1]))
        assert p.truncated(*dims) == q.truncated(*dims)


def test_general_constraint(diagonal_n4):
    for j in range(1, 3):
        assert check_general_constraint(diagonal_n4, j).is_zero()
    with pytest.raises(IndexOutOfRange):
        check_general_constraint(diagonal_n4, 3)
    with pytest.raises(IndexOutOfRange):
        check_general_constraint(diagonal_n4, 0)


def test_general_constraint_cp2(generic_cp2):
    assert check_general_constraint(generic_cp2, 1).is_zero()


def test_constraint_violation_detected(h8):
    # hand-built tower: gamma_1 psi_1 given a component along z_2
    n = 3
    u = SuperVector([poly(h8, 1), poly(h8, 0, 1), poly(h8, 0, 0, 1)])
    psis = [u, u.partial("plus"), u.partial("plus").partial("plus")]
    eta = h8.gen(eta_index(0)) + h8.gen(0).gmul(h8.const(1)).scale_i()
    zero = ge_zero(h8.ctx_, h8.base_, *psis[2].dims, True)
    # alpha row claims gamma_1 psi_1 = eta psi_1 + eta psi_2 -> z_2 component
    bundle = assemble_tower_bundle(
        psis, {1: [zero, eta], 2: [zero, zero, eta]})
    bundle.gamma_psi[1] = bundle.gamma_psi[1] + bundle.psis[2].lmul(eta)
    assert not check_general_constraint(bundle, 1).is_zero()


def test_prop3_residuals(diagonal_n4):
    residuals = prop3_residuals(diagonal_n4)
    assert len(residuals) == 4
    for j, (mres, pres) in enumerate(residuals):
        assert mres.is_zero(), f"minus branch j={j}"
        assert pres.is_zero(), f"plus branch j={j}"
    # j = 0 minus branch is the holomorphy statement D- z_0 = 0
    assert diagonal_n4.zs[0].super_derive("minus").is_zero()


def test_prop3_closed_form(diagonal_n4):
    # D- z_j = -(alpha_j^(j))^dag (|z_j|^2/|z_{j-1}|^2) z_{j-1}
    b = diagonal_n4
    for j in range(1, b.n):
        alpha_jj = b.alpha_table[j][j]
        coef = alpha_jj.gconj().gmul(b.norms[j]).gmul(b.inv_norms[j - 1])
        rhs = b.zs[j - 1].lmul(coef).scale(-1)
        lhs = b.zs[j].super_derive("minus")
        assert (lhs - rhs.truncated(*lhs.dims)).is_zero(), f"j={j}"


def test_b_matrix_telescoping(diagonal_n4):
    b = diagonal_n4
    for j in range(b.n):
        dp = b.projectors[j].super_derive("plus")
        res = dp - b_matrix(b, j).truncated(*dp.dims)
        if j > 0:
            res = res + b_matrix(b, j - 1).truncated(*res.dims)
        assert res.is_zero(), f"telescoping at {j}"
    # partial sums: sum_{k<=j} D+ P_k = B_j
    acc = None
    for j in range(b.n):
        dp = b.projectors[j].super_derive("plus")
        acc = dp if acc is None else acc + dp
        assert (acc - b_matrix(b, j).truncated(*acc.dims)).is_zero()
    # last index: B_{n-1} = 0, consistent with sum P = I
    assert b_matrix(b, b.n - 1).is_zero()
    with pytest.raises(IndexOutOfRange):
        b_matrix(b, b.n)


def test_theorem_xi_identity(diagonal_n4):
    from supercpn import theorem_xi_residual
    for j in range(diagonal_n4.n):
        assert theorem_xi_residual(diagonal_n4, j).is_zero(), f"j={j}"


def test_expansion_recovery(diagonal_n4):
    from supercpn import expand_in_basis
    b = diagonal_n4
    for j in range(1, b.n):
        coeffs, resid = expand_in_basis(
            b.psis[j - 1].super_derive("plus"), b.psis[:j + 1])
        assert resid.is_zero()
        for c, stored in zip(coeffs, b.alpha_table[j]):
            assert c == stored.truncated(c.dp, c.dm)


def test_nonconstant_eta_b_rejected(h8):
    data = diag_data(h8, 3)
    bad = DiagonalGammaData(
        n=3,
        eta=FermionicParameter(data.eta.f, poly(h8, 1, 1)),
        psi0b=SuperVector(list(data.psi0b)[:3]),
        psi_last_f=SuperVector(list(data.psi_last_f)[:3]))
    with pytest.raises(OrderMismatch):
        build_diagonal_solution(bad)


def test_assemble_tower_bundle_verifies(h8):
    # feed the diagonal tower back through the external-tower entry point
    data = diag_data(h8, 3)
    built = build_diagonal_solution(data)
    rebuilt = assemble_tower_bundle(
        [p for p in built.psis], dict(built.alpha_table))
    from supercpn import verify_all
    rep = verify_all(rebuilt)
    assert rep.passed


def test_fermion_free_bundle_verifies_with_empty_odd_sector(h8):
    # the bosonic embedding passes every check and carries no eta content
    data = diag_data(h8, 3)
    data = DiagonalGammaData(
        n=3, eta=FermionicParameter(h8.zero, h8.const(1)),
        psi0b=SuperVector(list(data.psi0b)[:3]),
        psi_last_f=SuperVector([h8.zero] * 3))
    bundle = build_diagonal_solution(data)
    from supercpn import verify_all
    rep = verify_all(bundle)
    assert rep.passed
    eta_bits = ~0b11  # anything beyond the two thetas
    for p in bundle.psis:
        for comp in p:
            assert all(not (m & eta_bits) for m in comp.table)


def test_random_diagonal_draws(ctx2):
    rng = random.Random(17)
    from supercpn.sampling import draw_until_built
    for seed in (1, 2):
        def make():
            return rand_diagonal_data(rng, ctx2, rand_base_point(rng),
                                      8, 8, 4)
        bundle = draw_until_built(
            rng, lambda d: build_diagonal_solution(d, seed=seed), make)
        eta = bundle.alpha_table[1][1]
        for j in range(1, 4):
            res = (bundle.psis[j].lmul(eta)
                   - bundle.psis[j - 1].super_derive("plus"))
            assert res.is_zero()
