"""Jet ring: truncated products, derivatives, conjugation, inversion."""

import random
from fractions import Fraction

import pytest

from supercpn import GRat, Jet, jet_constant, jet_coordinate, jet_poly
from supercpn.errors import BasePointMismatch, JetOrderExhausted, ZeroBody
from supercpn.jets import jet_zero, pack

X0 = GRat(Fraction(1, 2), Fraction(-1, 3))


def rnd_poly(rng, degree):
    return [GRat(Fraction(rng.randint(-7, 7), rng.randint(1, 5)),
                 Fraction(rng.randint(-7, 7), rng.randint(1, 5)))
            for _ in range(degree + 1)]


def poly_mul(f, g):
    out = [GRat(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return out


def test_product_matches_polynomial_oracle():
    # jet(f) * jet(g) == jet(f*g) whenever the truncation holds the product
    rng = random.Random(0)
    for _ in range(25):
        f = rnd_poly(rng, rng.randint(0, 3))
        g = rnd_poly(rng, rng.randint(0, 3))
        jf = jet_poly(X0, 7, 7, f)
        jg = jet_poly(X0, 7, 7, g)
        assert jf * jg == jet_poly(X0, 7, 7, poly_mul(f, g))


def test_zero_product():
    f = jet_poly(X0, 5, 5, [GRat(1), GRat(2)])
    z = jet_zero(X0, 5, 5)
    assert (f * z).is_zero() and (z * f).is_zero()


def test_geometric_series_reciprocal():
    # 1/(1 + h) = 1 - h + h^2 - ... in the offset variable
    one_plus_h = Jet(X0, 6, 6, 1, {0: (1, 0), pack(1, 0): (1, 0)})
    r = one_plus_h.reciprocal()
    for p in range(7):
        assert r.coeff(p, 0) == GRat((-1) ** p)
    assert r * one_plus_h == jet_constant(X0, 6, 6, GRat(1))


def test_reciprocal_round_trip_random():
    rng = random.Random(1)
    one = jet_constant(X0, 5, 5, GRat(1))
    for _ in range(20):
        f = (jet_poly(X0, 5, 5, rnd_poly(rng, 3))
             * jet_poly(X0, 5, 5, rnd_poly(rng, 2), direction="minus"))
        if not f.body():
            continue
        assert f * f.reciprocal() == one


def test_reciprocal_scalar():
    assert jet_constant(X0, 4, 4, GRat(2)).reciprocal() == \
        jet_constant(X0, 4, 4, GRat(Fraction(1, 2)))


def test_reciprocal_zero_body_raises():
    # f(x) = x - x0 vanishes at the base point
    with pytest.raises(ZeroBody):
        jet_poly(X0, 4, 4, [-X0, GRat(1)]).reciprocal()


def test_derivative_of_constant_and_power():
    c = jet_constant(X0, 4, 4, GRat(5))
    assert c.derive("plus").is_zero()
    x2 = jet_poly(X0, 4, 4, [GRat(0), GRat(0), GRat(1)])
    assert x2.derive("plus") == jet_poly(X0, 3, 4, [GRat(0), GRat(2)])


def test_mixed_partials_commute():
    rng = random.Random(2)
    for _ in range(20):
        f = (jet_poly(X0, 5, 5, rnd_poly(rng, 3))
             * jet_poly(X0, 5, 5, rnd_poly(rng, 3), direction="minus"))
        assert f.derive("plus").derive("minus") == \
            f.derive("minus").derive("plus")


def test_order_exhausted():
    f = jet_poly(X0, 1, 0, [GRat(1), GRat(1)])
    f = f.derive("plus")
    with pytest.raises(JetOrderExhausted):
        f.derive("plus")
    with pytest.raises(JetOrderExhausted):
        f.derive("minus")


def test_conjugate_swaps_coordinates():
    xp = jet_coordinate(X0, 5, 5, "plus")
    xm = jet_coordinate(X0, 5, 5, "minus")
    assert xp.conjugate() == xm
    assert xm.conjugate() == xp


def test_conjugate_involution_and_multiplicativity():
    rng = random.Random(3)
    for _ in range(20):
        f = (jet_poly(X0, 5, 5, rnd_poly(rng, 2))
             * jet_poly(X0, 5, 5, rnd_poly(rng, 2), direction="minus"))
        g = jet_poly(X0, 5, 5, rnd_poly(rng, 3))
        assert f.conjugate().conjugate() == f
        assert (f * g).conjugate() == f.conjugate() * g.conjugate()


def test_base_point_mismatch():
    f = jet_poly(X0, 4, 4, [GRat(1)])
    g = jet_poly(GRat(2), 4, 4, [GRat(1)])
    with pytest.raises(BasePointMismatch):
        f * g


def test_products_align_to_min_orders():
    f = jet_poly(X0, 6, 2, [GRat(1), GRat(1)])
    g = jet_poly(X0, 3, 5, [GRat(2)])
    assert (f * g).dp == 3 and (f * g).dm == 2
    assert (f + g).dp == 3 and (f + g).dm == 2


def test_sqrt_round_trip():
    x1 = GRat(Fraction(3, 4))
    u = (jet_coordinate(x1, 4, 4, "plus") * jet_coordinate(x1, 4, 4, "minus")
         + jet_constant(x1, 4, 4, GRat(1)))
    s = u.sqrt()
    assert s * s == u
    assert s.body() == GRat(Fraction(5, 4))


def test_sqrt_requires_perfect_square_body():
    with pytest.raises(ZeroBody):
        jet_constant(X0, 3, 3, GRat(2)).sqrt()


def test_scale_by_imaginary_unit():
    f = jet_poly(X0, 3, 3, [GRat(1), GRat(2)])
    assert f.scale(GRat(0, 1)).scale(GRat(0, 1)) == -f


def test_float_backend_product():
    base = complex(0.5, -1 / 3)
    f = jet_poly(base, 5, 5, [1.0, 2.0], exact=False)
    g = jet_poly(base, 5, 5, [0.0, 1.0, 1.0], exact=False)
    h = f * g
    oracle = jet_poly(base, 5, 5, [0.0, 1.0, 3.0, 2.0], exact=False)
    assert (h - oracle).norm_float() < 1e-12
    r = f.reciprocal()
    one = jet_constant(base, 5, 5, 1.0, exact=False)
    assert ((f * r) - one).norm_float() < 1e-12
