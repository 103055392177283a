"""Elliptic-curve search helpers."""

import math

import pytest

from manypoints import polys as P
from manypoints.ellcrv import (
    CubicModel,
    LegendreCurve,
    find_char2_curve,
    find_curve_with_trace,
    largest_admissible_t,
    two_isogeny_image,
)
from manypoints.errors import NoAdmissibleT, SingularCurve
from manypoints.gf import make_field


def test_cubic_count_and_trace():
    ctx = make_field(7, 1)
    e = CubicModel(ctx, [1, 1, 0, 1])
    naive = 1
    for x in range(7):
        v = P.evaluate(ctx, e.cubic, x)
        naive += sum(1 for y in range(7) if ctx.mul(y, y) == v)
    assert e.count_points() == naive
    assert e.trace() == 7 + 1 - naive


def test_singular_cubic_rejected():
    ctx = make_field(5, 1)
    with pytest.raises(SingularCurve):
        CubicModel(ctx, P.mul(ctx, [1, 1], P.mul(ctx, [1, 1], [2, 1])))


@pytest.mark.parametrize("q,modulus,residues,coprime", [
    (13, 8, [(13 + 1) % 8], False),
    (29, 16, [2, 14], True),
    (101, 2, [0], False),
])
def test_largest_admissible_t(q, modulus, residues, coprime):
    tt = largest_admissible_t(q, modulus, residues, coprime=coprime)
    assert tt.t * tt.t <= 4 * q
    assert tt.t % modulus in {r % modulus for r in residues}
    if coprime:
        assert math.gcd(tt.t, q) == 1
    # nothing larger works
    for t in range(tt.t + 1, math.isqrt(4 * q) + 1):
        ok = t % modulus in {r % modulus for r in residues}
        if coprime:
            ok = ok and math.gcd(t, q) == 1
        assert not ok


def test_no_admissible_t():
    with pytest.raises(NoAdmissibleT):
        largest_admissible_t(3, 8, [5])


@pytest.mark.parametrize("q", [13, 17, 29])
def test_find_curve_with_trace(q):
    ctx = make_field(q, 1)
    # full 2-torsion forces #E = q+1+t divisible by 4
    tt = largest_admissible_t(q, 4, [(-1 - q) % 4])
    e = find_curve_with_trace(ctx, tt)
    assert isinstance(e, LegendreCurve)
    assert e.count_points() == q + 1 + tt.t
    assert e.rational_two_torsion_count() == 3


def test_find_curve_with_square_conditions():
    ctx = make_field(13, 1)
    tt = largest_admissible_t(13, 4, [2])
    cond = lambda c, a, b: c.chi(c.mul(a, b)) == 1
    e = find_curve_with_trace(ctx, tt, square_conditions=(cond,))
    assert ctx.chi(ctx.mul(e.a, e.b)) == 1
    assert e.count_points() == 13 + 1 + tt.t


@pytest.mark.parametrize("q,b,c", [(13, 2, 5), (17, 3, 11), (9, 2, 7)])
def test_two_isogeny_preserves_trace(q, b, c):
    p, k = (3, 2) if q == 9 else (q, 1)
    ctx = make_field(p, k)
    src = CubicModel(ctx, P.mul(ctx, [0, 1],
                                P.mul(ctx, [ctx.neg(b), 1], [ctx.neg(c), 1])))
    img = two_isogeny_image(ctx, b, c)
    assert src.trace() == img.trace()


def test_two_isogeny_torsion_biconditional():
    # image has full rational 2-torsion iff bc is a square
    for q in (5, 7, 9, 13):
        p, k = (3, 2) if q == 9 else (q, 1)
        ctx = make_field(p, k)
        for b in range(1, q):
            for c in range(1, q):
                if b == c:
                    continue
                img = two_isogeny_image(ctx, b, c)
                full = img.rational_two_torsion_count() == 3
                assert full == (ctx.chi(ctx.mul(b, c)) == 1)


@pytest.mark.parametrize("q,t,bit", [(4, 3, 0), (8, 3, 1), (16, 7, 0)])
def test_find_char2_curve(q, t, bit):
    ctx = make_field(2, q.bit_length() - 1)
    tt = largest_admissible_t(q, 4, [t % 4], coprime=True)
    assert tt.t == t
    e = find_char2_curve(ctx, tt, trace_bit=bit)
    assert e.count_points() == q + 1 + t
    assert ctx.abs_trace(e.a) == bit
