"""Polynomial arithmetic over a field context."""

import random

import pytest

from manypoints import polys as P
from manypoints.errors import DivisionByZeroPoly
from manypoints.gf import make_field


def _rand_poly(rng, ctx, max_deg):
    d = rng.randrange(max_deg + 1)
    f = [rng.randrange(ctx.q) for _ in range(d)] + [rng.randrange(1, ctx.q)]
    return P.trim(f)


@pytest.mark.parametrize("p,k", [(2, 3), (3, 2), (7, 1)])
def test_divmod_roundtrip(p, k):
    ctx = make_field(p, k)
    rng = random.Random(99 + ctx.q)
    for _ in range(100):
        f = _rand_poly(rng, ctx, 8)
        g = _rand_poly(rng, ctx, 4)
        quo, rem = P.divmod_poly(ctx, f, g)
        back = P.add(ctx, P.mul(ctx, quo, g), rem)
        assert back == f
        assert P.degree(rem) < P.degree(g) or not rem


def test_divmod_by_zero():
    ctx = make_field(5, 1)
    with pytest.raises(DivisionByZeroPoly):
        P.divmod_poly(ctx, [1, 2, 3], [])


@pytest.mark.parametrize("p,k", [(2, 2), (5, 1), (3, 2)])
def test_gcd_divides_both(p, k):
    ctx = make_field(p, k)
    rng = random.Random(7 + ctx.q)
    for _ in range(60):
        f = _rand_poly(rng, ctx, 6)
        g = _rand_poly(rng, ctx, 6)
        d = P.gcd(ctx, f, g)
        assert not P.divmod_poly(ctx, f, d)[1]
        assert not P.divmod_poly(ctx, g, d)[1]


@pytest.mark.parametrize("p,k", [(2, 4), (3, 2), (13, 1)])
def test_factor_roundtrip_and_irreducibility(p, k):
    ctx = make_field(p, k)
    rng = random.Random(41 + ctx.q)
    for _ in range(40):
        f = _rand_poly(rng, ctx, 7)
        if P.degree(f) < 1:
            continue
        unit, facs = P.factor(ctx, f)
        prod = [unit]
        for phi, e in facs:
            assert P.is_irreducible(ctx, phi)
            assert phi[-1] == 1  # monic
            for _ in range(e):
                prod = P.mul(ctx, prod, phi)
        assert prod == f


def test_factor_is_deterministic_across_calls():
    ctx = make_field(2, 4)
    f = P.from_int_coeffs(ctx, [3, 5, 7, 1, 0, 1, 1])
    assert P.factor(ctx, f) == P.factor(ctx, f)


@pytest.mark.parametrize("p,k", [(3, 2), (7, 1), (2, 3)])
def test_roots_match_evaluation(p, k):
    ctx = make_field(p, k)
    rng = random.Random(5 + ctx.q)
    for _ in range(40):
        f = _rand_poly(rng, ctx, 6)
        if P.degree(f) < 1:
            continue
        rr = set(P.roots(ctx, f))
        for z in range(ctx.q):
            assert (P.evaluate(ctx, f, z) == 0) == (z in rr)


def test_compose_and_pow_mod():
    ctx = make_field(5, 1)
    f = [1, 2, 3]          # 3x^2 + 2x + 1
    g = [0, 0, 1]          # x^2
    h = P.compose(ctx, f, g)
    for z in range(5):
        assert P.evaluate(ctx, h, z) == P.evaluate(ctx, f, P.evaluate(ctx, g, z))
    m = [2, 0, 1]          # x^2 + 2
    got = P.pow_mod(ctx, [0, 1], 13, m)
    naive = [1]
    for _ in range(13):
        naive = P.mod(ctx, P.mul(ctx, naive, [0, 1]), m)
    assert got == naive


def test_squarefree_detection():
    ctx = make_field(3, 1)
    assert P.is_squarefree(ctx, [0, 1, 1])        # x(x+1)
    assert not P.is_squarefree(ctx, P.mul(ctx, [1, 1], [1, 1]))
    # char-p subtlety: x^3 - x is squarefree even though its derivative
    # has low degree
    assert P.is_squarefree(ctx, [0, 2, 0, 1])
