"""Shared fixtures: algebra contexts, base points, and cached bundles.

Bundle construction costs seconds; session scope keeps the suite fast.
"""

import random
from fractions import Fraction

import pytest

from supercpn import (AlgebraContext, GRat, build_cp2_solution,
                      build_cp2_special, build_diagonal_solution,
                      ge_constant, ge_from_jets, ge_generator, ge_one,
                      ge_zero, jet_poly)
from supercpn.sampling import (rand_base_point, rand_cp2_free_data,
                               rand_diagonal_data, draw_until_built)


@pytest.fixture(scope="session")
def ctx3():
    return AlgebraContext(pairs=3)


@pytest.fixture(scope="session")
def ctx2():
    return AlgebraContext(pairs=2)


@pytest.fixture(scope="session")
def base():
    return GRat(Fraction(1, 2), Fraction(1, 3))


def make_helpers(ctx, base, dims):
    """Small element factory bound to one context/base/orders."""
    class H:
        def poly(self, *coeffs):
            return ge_from_jets(
                ctx, {0: jet_poly(base, *dims, [GRat(c) for c in coeffs])},
                dims=dims)

        def const(self, v):
            return ge_constant(ctx, base, *dims, GRat(v))

        def gen(self, i):
            return ge_generator(ctx, base, *dims, i)

        one = property(lambda self: ge_one(ctx, base, *dims))
        zero = property(lambda self: ge_zero(ctx, base, *dims))
        ctx_ = ctx
        base_ = base
        dims_ = dims
    return H()


@pytest.fixture(scope="session")
def h6(ctx3, base):
    return make_helpers(ctx3, base, (6, 6))


@pytest.fixture(scope="session")
def generic_cp2(ctx3):
    """One generic exact bundle, seed 42, reused all over the suite."""
    rng = random.Random(42)
    def make():
        return rand_cp2_free_data(rng, ctx3, rand_base_point(rng), 7, 7)
    return draw_until_built(rng, lambda d: build_cp2_solution(d, seed=42),
                            make)


@pytest.fixture(scope="session")
def special_cp2(ctx3):
    rng = random.Random(2024)
    def build(d):
        return build_cp2_special(d, seed=2024)
    def make():
        return rand_cp2_free_data(rng, ctx3, rand_base_point(rng), 7, 7)
    return draw_until_built(rng, build, make)


@pytest.fixture(scope="session")
def diagonal_n4(ctx2):
    rng = random.Random(11)
    def make():
        return rand_diagonal_data(rng, ctx2, rand_base_point(rng), 8, 8, 4)
    return draw_until_built(rng,
                            lambda d: build_diagonal_solution(d, seed=11),
                            make)


@pytest.fixture(scope="session")
def float_cp2(ctx3):
    rng = random.Random(1)
    def make():
        return rand_cp2_free_data(rng, ctx3,
                                  rand_base_point(rng, exact=False), 7, 7,
                                  exact=False)
    return draw_until_built(rng, lambda d: build_cp2_solution(d, seed=1),
                            make)
