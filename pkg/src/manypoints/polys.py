"""Dense univariate polynomial arithmetic over a FieldCtx.

A polynomial is a list of encoded field elements, constant term first,
with no trailing zeros ([] is the zero polynomial).  All routines are
deterministic, including the equal-degree factor splitting.
"""

from __future__ import annotations

import random

from .errors import DivisionByZeroPoly
from .gf import FieldCtx


def trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f) -> int:
    """Degree of f, with deg 0 = -1."""
    return len(f) - 1


def constant(ctx: FieldCtx, c: int):
    return [c] if c else []


def add(ctx: FieldCtx, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else 0
        b = g[i] if i < len(g) else 0
        out.append(ctx.add(a, b))
    return trim(out)


def neg(ctx: FieldCtx, f):
    return [ctx.neg(c) for c in f]


def sub(ctx: FieldCtx, f, g):
    return add(ctx, f, neg(ctx, g))


def scale(ctx: FieldCtx, c: int, f):
    if c == 0:
        return []
    return trim([ctx.mul(c, a) for a in f])


def mul(ctx: FieldCtx, f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = ctx.add(out[i + j], ctx.mul(a, b))
    return trim(out)


def shift(f, n: int):
    """Multiply by x^n."""
    return [0] * n + f if f else []


def divmod_poly(ctx: FieldCtx, f, g):
    if not g:
        raise DivisionByZeroPoly("polynomial division by zero")
    f = list(f)
    dg = degree(g)
    inv_lead = ctx.inv(g[-1])
    quot = [0] * max(len(f) - dg, 0)
    while degree(f) >= dg:
        c = ctx.mul(f[-1], inv_lead)
        off = degree(f) - dg
        quot[off] = c
        for i in range(dg + 1):
            f[off + i] = ctx.sub(f[off + i], ctx.mul(c, g[i]))
        trim(f)
    return trim(quot), f


def mod(ctx: FieldCtx, f, g):
    return divmod_poly(ctx, f, g)[1]


def gcd(ctx: FieldCtx, f, g):
    f, g = list(f), list(g)
    while g:
        f, g = g, mod(ctx, f, g)
    return monic(ctx, f)


def monic(ctx: FieldCtx, f):
    if not f or f[-1] == 1:
        return list(f)
    return scale(ctx, ctx.inv(f[-1]), f)


def evaluate(ctx: FieldCtx, f, x: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = ctx.add(ctx.mul(acc, x), c)
    return acc


def derivative(ctx: FieldCtx, f):
    out = []
    for i in range(1, len(f)):
        m = i % ctx.p
        c = f[i]
        # multiply c by the integer i in the field
        acc = 0
        for _ in range(m):
            acc = ctx.add(acc, c)
        out.append(acc)
    return trim(out)


def is_squarefree(ctx: FieldCtx, f) -> bool:
    if degree(f) <= 0:
        return degree(f) == 0
    return degree(gcd(ctx, f, derivative(ctx, f))) == 0


def pow_mod(ctx: FieldCtx, f, e: int, m):
    result = [1]
    base = mod(ctx, f, m)
    while e:
        if e & 1:
            result = mod(ctx, mul(ctx, result, base), m)
        base = mod(ctx, mul(ctx, base, base), m)
        e >>= 1
    return result


def compose(ctx: FieldCtx, f, g):
    """f(g(x)) by Horner."""
    acc = []
    for c in reversed(f):
        acc = add(ctx, mul(ctx, acc, g), constant(ctx, c))
    return acc


def is_irreducible(ctx: FieldCtx, f) -> bool:
    f = monic(ctx, f)
    n = degree(f)
    if n <= 0:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if trim(list(pow_mod(ctx, x, ctx.q ** n, f))) != [0, 1]:
        return False
    primes = set()
    nn = n
    d = 2
    while d * d <= nn:
        if nn % d == 0:
            primes.add(d)
            while nn % d == 0:
                nn //= d
        d += 1
    if nn > 1:
        primes.add(nn)
    for d in primes:
        xe = pow_mod(ctx, x, ctx.q ** (n // d), f)
        if degree(gcd(ctx, f, sub(ctx, xe, x))) > 0:
            return False
    return True


def _edf(ctx: FieldCtx, f, d):
    """Equal-degree factorization: f = product of irreducibles of degree d.

    Deterministic: splitting elements come from a fixed-seed generator, so
    repeated runs factor identically.
    """
    n = degree(f)
    if n == d:
        return [f]
    factors = []
    stack = [f]
    rng = random.Random(0xED5)
    while stack:
        g = stack.pop()
        if degree(g) == d:
            factors.append(g)
            continue
        split = None
        while split is None:
            h = [rng.randrange(ctx.q) for _ in range(degree(g))]
            trim(h)
            if degree(h) < 1:
                continue
            if ctx.p == 2:
                # trace map T(h) = h + h^2 + ... + h^(2^(dk-1)) mod g
                acc = mod(ctx, h, g)
                cur = acc
                for _ in range(d * ctx.k - 1):
                    cur = mod(ctx, mul(ctx, cur, cur), g)
                    acc = add(ctx, acc, cur)
                cand = gcd(ctx, g, acc)
            else:
                e = (ctx.q ** d - 1) // 2
                w = pow_mod(ctx, h, e, g)
                cand = gcd(ctx, g, sub(ctx, w, [1]))
            if 0 < degree(cand) < degree(g):
                split = cand
        other = divmod_poly(ctx, g, split)[0]
        stack.append(split)
        stack.append(other)
    factors.sort(key=lambda fac: (degree(fac), fac))
    return factors


def factor(ctx: FieldCtx, f):
    """Full factorization into monic irreducibles.

    Returns (lead_coeff, [(factor, multiplicity), ...]) sorted by degree
    then coefficient list.
    """
    f = list(f)
    if degree(f) <= 0:
        return (f[0] if f else 0), []
    lead = f[-1]
    squarefree_parts = _yun(ctx, f, 1)
    out = []
    for part, m in squarefree_parts:
        # distinct-degree then equal-degree on the squarefree part
        g = list(part)
        d = 1
        x = [0, 1]
        xq = list(x)
        while degree(g) >= 2 * d:
            xq = pow_mod(ctx, xq, ctx.q, g)
            h = gcd(ctx, g, sub(ctx, xq, x))
            if degree(h) > 0:
                for irr in _edf(ctx, h, d):
                    out.append((irr, m))
                g = divmod_poly(ctx, g, h)[0]
                xq = mod(ctx, xq, g)
            d += 1
        if degree(g) > 0:
            out.append((g, m))
    # combine equal factors across parts
    combined = {}
    order = []
    for irr, m in out:
        key = tuple(irr)
        if key not in combined:
            combined[key] = 0
            order.append(key)
        combined[key] += m
    result = [(list(k), combined[k]) for k in order]
    result.sort(key=lambda t: (degree(t[0]), t[0]))
    return lead, result


def _yun(ctx: FieldCtx, f, mult):
    """Squarefree decomposition of monic f; returns [(part, multiplicity)].

    Handles inseparable blocks (derivative zero) by taking p-th roots.
    """
    out = []
    stack = [(monic(ctx, f), mult)]
    while stack:
        g, m = stack.pop()
        if degree(g) <= 0:
            continue
        dg = derivative(ctx, g)
        if not dg:
            root = [ctx.pow(g[i], ctx.q // ctx.p) for i in range(0, len(g), ctx.p)]
            stack.append((trim(root), m * ctx.p))
            continue
        c = gcd(ctx, g, dg)
        w = divmod_poly(ctx, g, c)[0]
        i = 1
        while degree(w) > 0:
            y = gcd(ctx, w, c)
            part = divmod_poly(ctx, w, y)[0]
            if degree(part) > 0:
                out.append((part, m * i))
            w = y
            if degree(c) > 0:
                c = divmod_poly(ctx, c, y)[0]
            i += 1
        if degree(c) > 0:
            stack.append((c, m))
    return out


def roots(ctx: FieldCtx, f):
    """Rational roots of f in the base field, sorted, without multiplicity."""
    if degree(f) <= 0:
        return []
    # gcd with x^q - x isolates the product of distinct linear factors
    x = [0, 1]
    xq = pow_mod(ctx, x, ctx.q, f)
    lin = gcd(ctx, f, sub(ctx, xq, x))
    if degree(lin) == 0:
        return []
    if degree(lin) <= 4 or ctx.q <= 4096:
        found = [z for z in range(ctx.q) if evaluate(ctx, lin, z) == 0]
        return sorted(found)
    out = []
    for irr, _m in factor(ctx, lin)[1]:
        if degree(irr) == 1:
            out.append(ctx.neg(irr[0]))
    return sorted(out)


def from_int_coeffs(ctx: FieldCtx, coeffs):
    """Build a polynomial from small integer coefficients (prime field)."""
    return trim([c % ctx.p for c in coeffs])
