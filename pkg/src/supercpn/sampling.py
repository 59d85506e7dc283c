"""Seeded random draws for property tests, demos and sweeps.

Coefficients are small Gaussian rationals (numerators and denominators
bounded by 7); odd parameters are supported on single eta generators by
default, rotated per draw so different seeds exercise different surviving
fermion products.  Base points avoid the degenerate loci by resampling
(at most 20 tries) whenever a construction reports a zero body.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .cp2 import CP2FreeData, FermionicParameter
from .errors import LinearDependence, ZeroBody
from .grassmann import eta_index, ge_from_jets, ge_zero
from .jets import jet_poly
from .scalars import GRat
from .superfields import SuperVector

MAX_TRIES = 20


def rand_fraction(rng, max_num=7, max_den=7, nonzero=False):
    while True:
        f = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
        if f or not nonzero:
            return f


def rand_grat(rng, max_num=7, max_den=7, nonzero=False):
    while True:
        g = GRat(rand_fraction(rng, max_num, max_den),
                 rand_fraction(rng, max_num, max_den))
        if g or not nonzero:
            return g


def rand_base_point(rng, exact=True):
    """Gaussian-rational base point within magnitude 7.

    Exact backend: denominators kept small (1..3) to limit coefficient
    growth through the reciprocal towers.  Float backend: magnitudes near 1
    so double precision keeps its headroom through the same towers.
    """
    if exact:
        return GRat(Fraction(rng.randint(-7, 7), rng.randint(1, 3)),
                    Fraction(rng.randint(-7, 7), rng.randint(1, 3)))
    g = GRat(Fraction(rng.randint(-2, 2), rng.randint(2, 3)),
             Fraction(rng.randint(-2, 2), rng.randint(2, 3)))
    return g.to_complex()


def rand_poly_coeffs(rng, degree, exact=True, nonzero_const=False,
                     max_den=2):
    # float draws keep every coefficient at magnitude <= 1: products over
    # high Grassmann degrees otherwise build scale hierarchies that double
    # precision cannot resolve
    max_num = 7 if exact else 2
    max_den = max_den if exact else 2
    coeffs = [rand_grat(rng, max_num, max_den,
                        nonzero=(m == 0 and nonzero_const))
              for m in range(degree + 1)]
    if not exact:
        coeffs = [c.to_complex() for c in coeffs]
    return coeffs


def poly_element(ctx, base, dp, dm, coeffs, exact=True):
    return ge_from_jets(
        ctx, {0: jet_poly(base, dp, dm, coeffs, exact=exact)}, dims=(dp, dm))


def odd_element(ctx, base, dp, dm, gen_index, coeffs, exact=True):
    return ge_from_jets(
        ctx, {1 << gen_index: jet_poly(base, dp, dm, coeffs, exact=exact)},
        dims=(dp, dm))


def rand_cp2_free_data(rng, ctx, base, dp, dm, exact=True, degree=3,
                       param_degree=1):
    """Generic draw with all ten parameter components active."""
    def body_param():
        if exact:
            coeffs = rand_poly_coeffs(rng, param_degree, exact,
                                      nonzero_const=True)
        else:
            # float: body pinned near 1 so the reciprocal jets stay flat
            coeffs = [complex(rng.choice((1, -1)))]
            coeffs += [0.5 * c for c in
                       rand_poly_coeffs(rng, param_degree, exact)[1:]]
        return poly_element(ctx, base, dp, dm, coeffs, exact)

    def odd_param(eta_a):
        coeffs = rand_poly_coeffs(rng, param_degree, exact)
        return odd_element(ctx, base, dp, dm, eta_index(eta_a), coeffs, exact)

    rot = rng.randrange(max(ctx.pairs, 1))

    def eta_slot(i):
        return (i + rot) % ctx.pairs

    # beta0..beta2 get three distinct etas so the triple product survives;
    # alpha1 differs from beta2 so their pair product (the nilpotent
    # operator correction) survives too.  With K = 3 a clash between
    # alpha's and beta's is unavoidable; the rotation varies which one.
    alpha = (FermionicParameter(odd_param(eta_slot(1)), body_param()),
             FermionicParameter(odd_param(eta_slot(0)), body_param()))
    beta = (FermionicParameter(odd_param(eta_slot(0)), body_param()),
            FermionicParameter(odd_param(eta_slot(1)), body_param()),
            FermionicParameter(odd_param(eta_slot(2)), body_param()))
    psi0b = SuperVector([
        poly_element(ctx, base, dp, dm,
                     rand_poly_coeffs(rng, degree, exact), exact)
        for _ in range(3)])
    psi2f = SuperVector([
        odd_element(ctx, base, dp, dm, eta_index(eta_slot(i)),
                    rand_poly_coeffs(rng, param_degree, exact), exact)
        for i in range(3)])
    return CP2FreeData(psi0b=psi0b, alpha=alpha, beta=beta, psi2f=psi2f)


def rand_diagonal_data(rng, ctx, base, dp, dm, n, exact=True, degree=None,
                       param_degree=1):
    """Diagonal-coefficient draw: constant even eta.b, odd eta.f of degree
    <= param_degree, seed polynomials of degree >= n-1 so the derivative
    tower stays independent."""
    from .cpn import DiagonalGammaData
    degree = (n - 1) if degree is None else degree
    eta_f = odd_element(ctx, base, dp, dm, eta_index(0),
                        rand_poly_coeffs(rng, param_degree, exact), exact)
    if exact:
        eta_b_coeffs = rand_poly_coeffs(rng, 0, exact, nonzero_const=True)
    else:
        eta_b_coeffs = [complex(rng.choice((1, -1)))]
    eta_b = poly_element(ctx, base, dp, dm, eta_b_coeffs, exact)
    psi0b = SuperVector([
        poly_element(ctx, base, dp, dm, rand_poly_coeffs(rng, degree, exact),
                     exact)
        for _ in range(n)])
    last = SuperVector([
        odd_element(ctx, base, dp, dm, eta_index(i % ctx.pairs),
                    rand_poly_coeffs(rng, param_degree, exact), exact)
        for i in range(n)])
    return DiagonalGammaData(n=n, eta=FermionicParameter(eta_f, eta_b),
                             psi0b=psi0b, psi_last_f=last)


def draw_until_built(rng, build, make_data, tries=MAX_TRIES):
    """Repeat `make_data` (fresh randomness each try) until `build` stops
    raising degenerate-point errors."""
    last = None
    for _ in range(tries):
        data = make_data()
        try:
            return build(data)
        except (LinearDependence, ZeroBody) as exc:
            last = exc
    raise LinearDependence(f"no non-degenerate draw in {tries} tries: {last}")
