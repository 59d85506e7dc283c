"""Inner products, Gram-Schmidt towers, projectors, even-matrix inversion."""

import random
from fractions import Fraction

import pytest

from supercpn import (GRat, SuperMatrix, SuperVector, cross3, expand_in_basis,
                      ge_constant, ge_from_jets, ge_one, gram_schmidt, inner,
                      jet_poly, mat_commutator, mat_invert_even, norm_sq,
                      projector_from, super_derive)
from supercpn.errors import (DimensionMismatch, LinearDependence, ParityError,
                             SingularBody, ZeroBody)
from supercpn.grassmann import eta_bar_index, eta_index
from supercpn.jets import jet_coordinate


def poly(h, *coeffs):
    return ge_from_jets(
        h.ctx_, {0: jet_poly(h.base_, *h.dims_, [GRat(c) for c in coeffs])},
        dims=h.dims_)


def basis_vec(h, n, i):
    return SuperVector([h.one if j == i else h.zero for j in range(n)])


def rand_even_scalar(h, rng, soul_terms=2):
    out = poly(h, rng.randint(1, 5), rng.randint(-3, 3))
    masks = [m for m in range(1, 1 << h.ctx_.gens) if m.bit_count() % 2 == 0]
    for m in rng.sample(masks, soul_terms):
        c = GRat(Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
        out = out + ge_from_jets(
            h.ctx_, {m: jet_poly(h.base_, *h.dims_, [c, GRat(1)])},
            dims=h.dims_)
    return out


def test_inner_standard_basis(h6):
    e1, e2 = basis_vec(h6, 3, 0), basis_vec(h6, 3, 1)
    assert inner(e1, e2).is_zero()
    assert inner(e1, e1) == h6.one


def test_inner_normalized_phi(h6):
    # Phi = (1, x+)/sqrt(1+x+x-) at a base point where the sqrt is rational
    x1 = GRat(Fraction(3, 4))
    dims = (4, 4)
    s = (jet_coordinate(x1, *dims, "plus") * jet_coordinate(x1, *dims, "minus")
         + __import__("supercpn").jet_constant(x1, *dims, GRat(1))).sqrt()
    sinv = ge_from_jets(h6.ctx_, {0: s.reciprocal()})
    one_c = ge_from_jets(h6.ctx_, {0: __import__("supercpn").jet_constant(
        x1, *dims, GRat(1))})
    xplus = ge_from_jets(h6.ctx_, {0: jet_coordinate(x1, *dims, "plus")})
    phi = SuperVector([one_c, xplus]).lmul(sinv)
    assert inner(phi, phi) == ge_one(h6.ctx_, x1, *phi.dims)


def test_inner_conjugate_symmetry(h6):
    rng = random.Random(0)
    for _ in range(10):
        u = SuperVector([rand_even_scalar(h6, rng) for _ in range(3)])
        v = SuperVector([rand_even_scalar(h6, rng) for _ in range(3)])
        assert inner(u, v).gconj() == inner(v, u)
    with pytest.raises(DimensionMismatch):
        inner(SuperVector([h6.one]), SuperVector([h6.one, h6.one]))


def test_gram_schmidt_orthonormal_input_unchanged(h6):
    es = [basis_vec(h6, 3, i) for i in range(3)]
    zs, norms, _ = gram_schmidt(es)
    for e, z in zip(es, zs):
        assert z == e
    for n in norms:
        assert n == h6.one


def test_gram_schmidt_orthogonality_and_px_oracle(h6):
    u = SuperVector([poly(h6, 1), poly(h6, 0, 1), poly(h6, 0, 0, 1)])
    psis = [u, u.partial("plus"), u.partial("plus").partial("plus")]
    zs, norms, invs = gram_schmidt(psis)
    for i in range(3):
        for j in range(i):
            assert inner(zs[i], zs[j]).is_zero()
    # z_1 equals the orthogonalising derivative P_x u = du - (u^dag du/|u|^2) u
    du = u.partial("plus")
    pxu = du - u.lmul(inner(u, du).gmul(norm_sq(u).ginvert()))
    assert zs[1].truncated(*pxu.dims) == pxu.truncated(*zs[1].dims)


def test_gram_schmidt_duplicate_raises(h6):
    u = SuperVector([poly(h6, 1), poly(h6, 0, 1), poly(h6, 2)])
    with pytest.raises(LinearDependence):
        gram_schmidt([u, u])


def test_gram_schmidt_parity_guard(h6):
    odd = SuperVector([h6.gen(eta_index(0)), h6.zero, h6.zero])
    with pytest.raises(ParityError):
        gram_schmidt([odd])


def test_projector_from_basis_vector(h6):
    p = projector_from(basis_vec(h6, 3, 0))
    ident = SuperMatrix.identity(h6.ctx_, h6.base_, *h6.dims_, 3)
    for i in range(3):
        for j in range(3):
            expect = ident[0][0] if (i, j) == (0, 0) else ident[0][1]
            assert (p[i][j] == h6.one) == ((i, j) == (0, 0))


def test_projector_properties_random_grassmann(h6):
    rng = random.Random(1)
    for _ in range(5):
        z = SuperVector([rand_even_scalar(h6, rng) for _ in range(3)])
        p = projector_from(z)
        assert (p.dagger() - p).is_zero()
        assert ((p @ p) - p).is_zero()
        tr = p.trace()
        assert tr == ge_one(h6.ctx_, h6.base_, tr.dp, tr.dm)


def test_projector_zero_body(h6):
    z = SuperVector([h6.gen(0).gmul(h6.gen(eta_index(0))), h6.zero, h6.zero])
    with pytest.raises(ZeroBody):
        projector_from(z)


def test_commutator_identities(h6):
    a = SuperMatrix([[poly(h6, 1, 1), h6.one], [h6.zero, poly(h6, 2)]])
    assert mat_commutator(a, a).is_zero()
    d1 = SuperMatrix([[poly(h6, 2), h6.zero], [h6.zero, poly(h6, 3)]])
    d2 = SuperMatrix([[poly(h6, 5), h6.zero], [h6.zero, poly(h6, 7)]])
    assert mat_commutator(d1, d2).is_zero()


def test_orthogonal_projectors_commute(h6):
    u = SuperVector([poly(h6, 1), poly(h6, 0, 1), poly(h6, 0, 0, 1)])
    psis = [u, u.partial("plus"), u.partial("plus").partial("plus")]
    zs, _, invs = gram_schmidt(psis)
    p0 = projector_from(zs[0], invs[0])
    p1 = projector_from(zs[1], invs[1])
    assert mat_commutator(p0, p1.truncated(*p0.dims)).is_zero()


def test_completeness(h6):
    u = SuperVector([poly(h6, 1), poly(h6, 0, 1), poly(h6, 0, 0, 1)])
    psis = [u, u.partial("plus"), u.partial("plus").partial("plus")]
    zs, _, invs = gram_schmidt(psis)
    ps = [projector_from(z, ninv) for z, ninv in zip(zs, invs)]
    total = ps[0] + ps[1] + ps[2]
    ident = SuperMatrix.identity(h6.ctx_, h6.base_, *total.dims, 3)
    assert (total - ident).is_zero()


def test_projector_scaling_invariance(h6):
    rng = random.Random(2)
    u = SuperVector([poly(h6, 1), poly(h6, 0, 1), poly(h6, 0, 0, 1)])
    psis = [u, u.partial("plus"), u.partial("plus").partial("plus")]
    scale = rand_even_scalar(h6, rng)  # even, invertible body
    scaled = [psis[0], psis[1].lmul(scale), psis[2]]
    zs1, _, inv1 = gram_schmidt(psis)
    zs2, _, inv2 = gram_schmidt(scaled)
    for z1, i1, z2, i2 in zip(zs1, inv1, zs2, inv2):
        p1 = projector_from(z1, i1)
        p2 = projector_from(z2, i2)
        dims = (min(p1.dims[0], p2.dims[0]), min(p1.dims[1], p2.dims[1]))
        assert p1.truncated(*dims) == p2.truncated(*dims)


def test_mat_invert_even(h6):
    ident = SuperMatrix.identity(h6.ctx_, h6.base_, *h6.dims_, 2)
    assert mat_invert_even(ident) == ident
    d = SuperMatrix([[h6.const(2), h6.zero], [h6.zero, h6.const(3)]])
    dinv = mat_invert_even(d)
    assert dinv[0][0] == h6.const(GRat(Fraction(1, 2)))
    assert dinv[1][1] == h6.const(GRat(Fraction(1, 3)))
    rng = random.Random(3)
    for _ in range(5):
        m = SuperMatrix([[rand_even_scalar(h6, rng) for _ in range(2)]
                         for _ in range(2)])
        try:
            minv = mat_invert_even(m)
        except SingularBody:
            continue
        prod = m @ minv
        ident2 = SuperMatrix.identity(h6.ctx_, h6.base_, *prod.dims, 2)
        assert (prod - ident2).is_zero()


def test_mat_invert_even_errors(h6):
    odd = SuperMatrix([[h6.gen(eta_index(0)), h6.zero], [h6.zero, h6.one]])
    with pytest.raises(ParityError):
        mat_invert_even(odd)
    singular = SuperMatrix([[h6.one, h6.one], [h6.one, h6.one]])
    with pytest.raises(SingularBody):
        mat_invert_even(singular)


def test_expand_in_basis_identity(h6):
    basis = [SuperVector([poly(h6, 1), poly(h6, 0, 1), poly(h6, 1, 1)]),
             SuperVector([poly(h6, 0, 1), poly(h6, 1), poly(h6, 2)])]
    coeffs, resid = expand_in_basis(basis[0], basis)
    assert resid.is_zero()
    one = ge_one(h6.ctx_, h6.base_, coeffs[0].dp, coeffs[0].dm)
    assert coeffs[0] == one and coeffs[1].is_zero()


def test_expand_in_basis_odd_coefficients(h6):
    basis = [SuperVector([poly(h6, 1), poly(h6, 0, 1), poly(h6, 1, 1)]),
             SuperVector([poly(h6, 0, 1), poly(h6, 1), poly(h6, 2)])]
    c0 = h6.gen(eta_index(0)).gmul(poly(h6, 1, 1))
    c1 = h6.gen(eta_index(1))
    w = basis[0].lmul(c0) + basis[1].lmul(c1)
    coeffs, resid = expand_in_basis(w, basis)
    assert resid.is_zero()
    assert coeffs[0] == c0.truncated(coeffs[0].dp, coeffs[0].dm)
    assert coeffs[1] == c1.truncated(coeffs[1].dp, coeffs[1].dm)


def test_expand_in_basis_out_of_span(h6):
    basis = [basis_vec(h6, 3, 0), basis_vec(h6, 3, 1)]
    w = SuperVector([h6.one, h6.zero, poly(h6, 0, 1)])
    coeffs, resid = expand_in_basis(w, basis)
    assert not resid.is_zero()
    assert resid[2] == poly(h6, 0, 1)


def test_cross3_examples(h6):
    e = [basis_vec(h6, 3, i) for i in range(3)]
    assert cross3(e[0], e[1]) == e[2]
    assert cross3(e[1], e[2]) == e[0]
    u = SuperVector([poly(h6, 1), poly(h6, 0, 1), poly(h6, 2, 1)])
    assert cross3(u, u).is_zero()
    with pytest.raises(DimensionMismatch):
        cross3(SuperVector([h6.one]), SuperVector([h6.one]))
    odd = SuperVector([h6.gen(eta_index(0))] * 3)
    with pytest.raises(ParityError):
        cross3(odd, odd)
