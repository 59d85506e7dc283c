"""Odd superderivatives, theta decomposition, vectors and matrices."""

import random
from fractions import Fraction

import pytest

from supercpn import (GRat, SuperMatrix, SuperVector, assemble_plus,
                      ge_constant, ge_from_jets, ge_generator, ge_one,
                      is_holomorphic, jet_poly, split_plus, super_derive)
from supercpn.errors import DimensionMismatch, OrderMismatch
from supercpn.grassmann import eta_index


def poly(h, *coeffs):
    return ge_from_jets(
        h.ctx_, {0: jet_poly(h.base_, *h.dims_, [GRat(c) for c in coeffs])},
        dims=h.dims_)


def rand_superfield(h, rng, homogeneous=None):
    """A few random monomials with polynomial jets in both coordinates."""
    from supercpn.jets import jet_poly as jp
    out = h.zero
    masks = [m for m in range(1 << h.ctx_.gens)
             if homogeneous is None or m.bit_count() % 2 == homogeneous]
    for m in rng.sample(masks, 4):
        coeffs = [GRat(Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
                  for _ in range(3)]
        jet = jp(h.base_, *h.dims_, coeffs)
        if rng.random() < 0.5:
            jet = jet * jp(h.base_, *h.dims_,
                           [GRat(rng.randint(-3, 3)), GRat(1)],
                           direction="minus")
        out = out + ge_from_jets(h.ctx_, {m: jet}, dims=h.dims_)
    return out


def test_super_derive_theta_plus(h6):
    tp = h6.gen(0)
    d = super_derive(tp, "plus")
    assert d == ge_constant(h6.ctx_, h6.base_, d.dp, d.dm, GRat(0, -1))


def test_super_derive_squares(h6):
    rng = random.Random(0)
    for _ in range(10):
        f = rand_superfield(h6, rng)
        for direction in ("plus", "minus"):
            lhs = super_derive(super_derive(f, direction), direction)
            rhs = f.partial(direction).truncated(lhs.dp, lhs.dm)
            assert lhs == rhs.scale_i().scale(-1)


def test_super_derive_anticommutator(h6):
    rng = random.Random(1)
    for _ in range(10):
        f = rand_superfield(h6, rng)
        r = (super_derive(super_derive(f, "plus"), "minus")
             + super_derive(super_derive(f, "minus"), "plus"))
        assert r.is_zero()


def test_super_derive_graded_leibniz(h6):
    rng = random.Random(2)
    for _ in range(10):
        pa = rng.randint(0, 1)
        f = rand_superfield(h6, rng, homogeneous=pa)
        g = rand_superfield(h6, rng)
        for direction in ("plus", "minus"):
            lhs = super_derive(f.gmul(g), direction)
            rhs = (super_derive(f, direction).gmul(g)
                   + f.gmul(super_derive(g, direction))
                   .scale(-1 if pa else 1))
            assert lhs == rhs


def test_super_derive_conjugation_exchange(h6):
    # (D+ f)^dag = (-1)^|f| D- (f^dag) on homogeneous fields
    rng = random.Random(3)
    for _ in range(10):
        pa = rng.randint(0, 1)
        f = rand_superfield(h6, rng, homogeneous=pa)
        lhs = super_derive(f, "plus").gconj()
        rhs = super_derive(f.gconj(), "minus").scale(-1 if pa else 1)
        assert lhs == rhs


def test_holomorphic_examples(h6):
    f = poly(h6, 0, 1) + h6.gen(0).gmul(h6.gen(eta_index(0)))
    assert is_holomorphic(f)
    xm = ge_from_jets(
        h6.ctx_,
        {0: jet_poly(h6.base_, *h6.dims_, [GRat(0), GRat(1)],
                     direction="minus")})
    assert not is_holomorphic(xm)
    assert not is_holomorphic(h6.gen(1))  # theta- content


def test_holomorphic_kills_minus_derivative(h6):
    psi = assemble_plus(h6.gen(eta_index(0)).gmul(poly(h6, 1, 1)),
                        poly(h6, 2, 0, 1))
    assert is_holomorphic(psi)
    assert super_derive(psi, "minus").is_zero()


def test_split_assemble_round_trip(h6):
    f_part = h6.gen(eta_index(1)).gmul(poly(h6, 1, 2))
    b_part = poly(h6, 3, 0, 1)
    x = assemble_plus(f_part, b_part)
    f2, b2 = split_plus(x)
    assert f2 == f_part and b2 == b_part
    assert assemble_plus(f2, b2) == x


def test_split_rejects_theta_minus(h6):
    with pytest.raises(OrderMismatch):
        split_plus(h6.gen(1))


def test_vector_ops(h6):
    u = SuperVector([poly(h6, 1), poly(h6, 0, 1), poly(h6, 0, 0, 1)])
    v = SuperVector([h6.one, h6.zero, h6.one])
    w = u + v - v
    assert w == u
    assert (-u + u).is_zero()
    s = h6.gen(eta_index(0))
    assert u.lmul(s)[1] == s.gmul(u[1])
    with pytest.raises(DimensionMismatch):
        u + SuperVector([h6.one])


def test_vector_alignment_and_strict(h6):
    a = poly(h6, 1, 1)
    b = poly(h6, 2).partial("plus")  # one order lower in x+
    v = SuperVector([a, b])
    assert v.dims == (h6.dims_[0] - 1, h6.dims_[1])
    with pytest.raises(OrderMismatch):
        SuperVector([a, b], strict=True)


def test_matrix_identity_and_product(h6):
    ident = SuperMatrix.identity(h6.ctx_, h6.base_, *h6.dims_, 3)
    a = SuperMatrix([[poly(h6, 1, 1), h6.zero, h6.one],
                     [h6.one, poly(h6, 2), h6.zero],
                     [h6.zero, h6.one, h6.one]])
    assert ident @ a == a and a @ ident == a
    b = SuperMatrix([[h6.one, h6.one, h6.zero],
                     [h6.zero, h6.one, h6.zero],
                     [poly(h6, 0, 1), h6.zero, h6.one]])
    c = SuperMatrix([[h6.one, h6.zero, poly(h6, 0, 2)],
                     [h6.one, h6.one, h6.zero],
                     [h6.zero, h6.zero, h6.one]])
    assert (a @ b) @ c == a @ (b @ c)


def test_matrix_dagger_reverses_products(h6):
    e0 = h6.gen(eta_index(0))
    a = SuperMatrix([[h6.one, e0], [h6.zero, h6.one]])
    b = SuperMatrix([[poly(h6, 1, 1), h6.zero],
                     [e0.gmul(h6.gen(eta_index(1))), h6.one]])
    assert (a @ b).dagger() == b.dagger() @ a.dagger()
    assert a.dagger().dagger() == a


def test_matrix_trace_and_apply(h6):
    a = SuperMatrix([[poly(h6, 1), h6.one], [h6.zero, poly(h6, 0, 1)]])
    assert a.trace() == poly(h6, 1) + poly(h6, 0, 1)
    u = SuperVector([h6.one, h6.one])
    assert a.apply(u) == SuperVector([poly(h6, 1) + h6.one, poly(h6, 0, 1)])
