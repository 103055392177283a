"""Weighted trace-power sums over the moduli of hyperelliptic curves.

Closed forms for S_n(q, H_g) (n = 2, 4, 6, 8) built from polynomial-
quotient brackets, an exact brute-force oracle that enumerates every
monic squarefree model, geometric-class grouping with per-class power
sums s_n(C), and the derived point-count lower bounds.

All pass/fail arithmetic is exact (integers and Fractions); floats only
appear in reporting helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import polys as P
from .errors import (
    BudgetExceeded,
    DivisionByZeroPoly,
    EvenQForS8,
    IntegralityViolation,
    NonIntegerResult,
    UnsupportedN,
)
from .gf import FieldCtx, is_prime, make_field

_BRUTE_MODEL_BUDGET = 10 ** 8


# ---------------------------------------------------------------------------
# exact polynomials in the variable q

class IntPolynomial:
    """Polynomial in q with exact rational coefficients, constant first."""

    def __init__(self, coeffs):
        self.coeffs = [Fraction(c) for c in coeffs]
        while self.coeffs and self.coeffs[-1] == 0:
            self.coeffs.pop()

    @classmethod
    def monomial(cls, n, c=1):
        return cls([0] * n + [c])

    def degree(self):
        return len(self.coeffs) - 1

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(
            [
                (self.coeffs[i] if i < len(self.coeffs) else 0)
                + (other.coeffs[i] if i < len(other.coeffs) else 0)
                for i in range(n)
            ]
        )

    def __neg__(self):
        return IntPolynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return IntPolynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__
    __radd__ = __add__

    def divmod(self, other):
        other = _as_poly(other)
        if not other.coeffs:
            raise DivisionByZeroPoly("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree()
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        while len(rem) - 1 >= dq and rem:
            c = rem[-1] / other.coeffs[-1]
            off = len(rem) - 1 - dq
            quot[off] = c
            for i in range(dq + 1):
                rem[off + i] -= c * other.coeffs[i]
            while rem and rem[-1] == 0:
                rem.pop()
        return IntPolynomial(quot), IntPolynomial(rem)

    def __call__(self, q):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def __eq__(self, other):
        return self.coeffs == _as_poly(other).coeffs

    def __repr__(self):
        return f"IntPolynomial({[str(c) for c in self.coeffs]})"


def _as_poly(x):
    if isinstance(x, IntPolynomial):
        return x
    return IntPolynomial([x])


def poly_quotient_bracket(f: IntPolynomial, g: IntPolynomial) -> IntPolynomial:
    """[f/g]: the quotient in the Euclidean division of f by g."""
    return f.divmod(g)[0]


# ---------------------------------------------------------------------------
# closed forms

@dataclass(frozen=True)
class SnResult:
    n: int
    q: int
    g: int
    value: int
    method: str
    models_enumerated: int = 0
    weight_denominator: int = 0


def _Q(*coeffs):
    """Polynomial in q from coefficients given constant-first."""
    return IntPolynomial(coeffs)


def S_closed_form(n: int, q: int, g: int) -> SnResult:
    """S_n(q, H_g) for n in {2, 4, 6, 8}; n = 8 needs odd q."""
    if g < 2:
        raise ValueError("g must be >= 2")
    if n not in (2, 4, 6, 8):
        raise UnsupportedN(f"no closed form for n = {n}")
    if n == 8 and q % 2 == 0:
        raise EvenQForS8("S_8 closed form holds for odd q only")
    qq = Fraction(q)
    q2g = IntPolynomial.monomial(2 * g)
    if n == 2:
        val = poly_quotient_bracket(q2g, _Q(1))(qq) - 1
    elif n == 4:
        br = poly_quotient_bracket(q2g * _Q(1, 1, 3), _Q(1, 1))(qq)
        val = (
            br
            - Fraction(1, 2) * (qq - 1) * (qq - 2) * (qq + 1) * g ** 2
            + Fraction(1, 2) * (-qq ** 3 + 2 * qq ** 2 - 7 * qq + 2) * g
            - 3 * qq
            + 2
        )
    elif n == 6:
        br = poly_quotient_bracket(q2g * _Q(1, 2, 16, 0, 15), _Q(1, 1) * _Q(1, 1))(qq)
        val = (
            br
            - Fraction(1, 24) * (qq - 1) * (qq - 3) * (qq + 1)
            * (qq ** 3 - 6 * qq ** 2 + 4 * qq + 13) * g ** 4
            - Fraction(1, 12) * (qq + 1) * (qq - 3) ** 2
            * (qq ** 3 - 4 * qq ** 2 + 18 * qq - 3) * g ** 3
            + Fraction(1, 24)
            * (qq ** 6 - 9 * qq ** 5 - 99 * qq ** 4 + 382 * qq ** 3
               - 469 * qq ** 2 + 491 * qq - 9) * g ** 2
            + Fraction(1, 12)
            * (qq ** 6 - 9 * qq ** 5 - 19 * qq ** 4 + 78 * qq ** 3
               - 423 * qq ** 2 + 567 * qq - 723) * g
            - 15 * qq ** 2 + 30 * qq - 61
        )
        if q % 2 == 0:
            val -= Fraction(5, 8) * g * (g - 1) * (g - 2) * ((g - 3) * (qq - 1) - 4)
    else:  # n == 8
        br = poly_quotient_bracket(
            q2g * _Q(1, 3, 66, -83, 273, -105, 105),
            _Q(1, 1) * _Q(1, 1) * _Q(1, 1),
        )(qq)
        val = (
            br
            - Fraction(1, 720) * (qq - 1) * (qq - 3) * (qq - 4) * (qq - 5)
            * (qq + 1) ** 2 * (qq ** 3 - 9 * qq ** 2 + 15 * qq + 33) * g ** 6
            - Fraction(1, 240) * (qq - 3) * (qq - 5) * (qq + 1)
            * (qq ** 6 - 13 * qq ** 5 + 92 * qq ** 4 - 280 * qq ** 3
               + 215 * qq ** 2 + 565 * qq - 100) * g ** 5
            + Fraction(1, 144) * (qq - 3) * (qq + 1)
            * (qq ** 7 - 18 * qq ** 6 - 11 * qq ** 5 + 828 * qq ** 4
               - 3455 * qq ** 3 + 5826 * qq ** 2 - 4947 * qq + 48) * g ** 4
            + Fraction(1, 48) * (qq - 3)
            * (qq ** 8 - 17 * qq ** 7 + 55 * qq ** 6 + 61 * qq ** 5
               - 1329 * qq ** 4 + 3573 * qq ** 3 - 3219 * qq ** 2
               + 2095 * qq + 124) * g ** 3
            + Fraction(1, 360)
            * (-2 * qq ** 9 + 40 * qq ** 8 + 19 * qq ** 7 - 2480 * qq ** 6
               - 3470 * qq ** 5 + 52390 * qq ** 4 - 166449 * qq ** 3
               + 338580 * qq ** 2 - 424098 * qq + 453870) * g ** 2
            + Fraction(1, 60)
            * (-qq ** 9 + 20 * qq ** 8 - 85 * qq ** 7 - 120 * qq ** 6
               - 214 * qq ** 5 + 2530 * qq ** 4 - 22515 * qq ** 3
               + 62220 * qq ** 2 - 127725 * qq + 201870) * g
            - 105 * qq ** 3 + 420 * qq ** 2 - 1218 * qq + 2582
        )
    if val.denominator != 1:
        raise NonIntegerResult(f"S_{n}({q},{g}) evaluated to non-integer {val}")
    return SnResult(n=n, q=q, g=g, value=int(val), method="closed_form")


# ---------------------------------------------------------------------------
# brute-force enumeration of monic squarefree models

_hist_cache = {}


def _field_for_q(q: int) -> FieldCtx:
    for p in range(2, q + 1):
        if is_prime(p) and q % p == 0:
            k = 0
            m = q
            while m > 1:
                if m % p:
                    raise ValueError(f"{q} is not a prime power")
                m //= p
                k += 1
            return make_field(p, k)
    raise ValueError(f"{q} is not a prime power")


def _squarefree_mask(ctx: FieldCtx, d: int):
    """Boolean mask over all q^d monic degree-d polynomials (indexed by the
    base-q encoding of their lower coefficients): True iff squarefree.

    Sieve: mark every multiple of phi^2 for each monic irreducible phi of
    degree <= d // 2.  The resulting count must equal q^d - q^(d-1); this
    is asserted.
    """
    import numpy as np

    q = ctx.q
    mask = np.ones(q ** d, dtype=bool)
    powers = [q ** j for j in range(d)]

    if ctx.k == 1:
        p = ctx.p

        def mark(a, m):
            # a: coeff list of monic phi^2, deg d - m; enumerate all monic h
            # of degree m and mark index of a * h
            hidx = np.arange(q ** m, dtype=np.int64)
            hdig = [(hidx // powers[j]) % q for j in range(m)] + [
                np.ones(q ** m, dtype=np.int64)
            ]
            idx = np.zeros(q ** m, dtype=np.int64)
            for j in range(d):
                acc = np.zeros(q ** m, dtype=np.int64)
                for i in range(max(0, j - m), min(j, d - m) + 1):
                    acc += a[i] * hdig[j - i]
                idx += (acc % p) * powers[j]
            mask[idx] = False

    else:
        add_t, mul_t, _ = ctx.np_tables()

        def mark(a, m):
            hidx = np.arange(q ** m, dtype=np.int64)
            hdig = [(hidx // powers[j]) % q for j in range(m)] + [
                np.ones(q ** m, dtype=np.int64)
            ]
            idx = np.zeros(q ** m, dtype=np.int64)
            for j in range(d):
                acc = np.zeros(q ** m, dtype=np.int64)
                for i in range(max(0, j - m), min(j, d - m) + 1):
                    if a[i]:
                        acc = add_t[acc, mul_t[a[i], hdig[j - i]]]
                idx += acc * powers[j]
            mask[idx] = False

    for e in range(1, d // 2 + 1):
        m = d - 2 * e
        for low in range(q ** e):
            phi = [(low // powers[j]) % q for j in range(e)] + [1]
            if not P.is_irreducible(ctx, phi):
                continue
            sq = P.mul(ctx, phi, phi)
            sq = sq + [0] * (d - m + 1 - len(sq))
            mark(sq, m)

    count = int(mask.sum())
    expected = q ** d - q ** (d - 1)
    assert count == expected, f"squarefree sieve miscount: {count} != {expected}"
    return mask


def _counts_for_degree(ctx: FieldCtx, d: int):
    """Point counts of y^2 = f (odd q) for all monic f of degree d, as a
    numpy int64 array indexed by the base-q coefficient encoding."""
    import numpy as np

    q = ctx.q
    powers = [q ** j for j in range(d)]
    idx = np.arange(q ** d, dtype=np.int64)
    digits = [(idx // powers[j]) % q for j in range(d)]
    _, mul_t, chi_t = ctx.np_tables()
    add_t = ctx.np_tables()[0]
    counts = np.full(q ** d, 1 + q if d % 2 else 2 + q, dtype=np.int64)
    for z in range(q):
        # f(z) = z^d + sum_j c_j z^j, all models at once
        zpow = [1]
        for _ in range(d):
            zpow.append(ctx.mul(zpow[-1], z))
        if ctx.k == 1:
            val = np.full(q ** d, zpow[d], dtype=np.int64)
            for j in range(d):
                val += digits[j] * zpow[j]
            val %= q
        else:
            val = np.full(q ** d, zpow[d], dtype=np.int64)
            for j in range(d):
                if zpow[j]:
                    val = add_t[val, mul_t[zpow[j], digits[j]]]
        counts += chi_t[val]
    return counts


def trace_histogram(q: int, g: int):
    """Histogram {tau: multiplicity} of tau = q+1-#C over all monic
    squarefree models of degree 2g+1 and 2g+2, plus the model count."""
    key = (q, g)
    if key in _hist_cache:
        return _hist_cache[key]
    if q % 2 == 0:
        raise ValueError("brute force is defined for odd q only")
    total_models = q ** (2 * g + 1) + q ** (2 * g + 2)
    if total_models > _BRUTE_MODEL_BUDGET:
        raise BudgetExceeded(f"{total_models} models exceed enumeration budget")
    import numpy as np

    ctx = _field_for_q(q)
    hist = {}
    n_models = 0
    for d in (2 * g + 1, 2 * g + 2):
        mask = _squarefree_mask(ctx, d)
        counts = _counts_for_degree(ctx, d)
        taus = (q + 1) - counts[mask]
        n_models += int(mask.sum())
        vals, mult = np.unique(taus, return_counts=True)
        for v, m in zip(vals.tolist(), mult.tolist()):
            hist[v] = hist.get(v, 0) + m
    _hist_cache[key] = (hist, n_models)
    return hist, n_models


def S_bruteforce(n: int, q: int, g: int) -> SnResult:
    """Exact S_n by enumerating every squarefree model y^2 = f with f of
    degree 2g+1 or 2g+2 and arbitrary leading coefficient, weighted by
    1/((q^3-q)(q-1)).

    Only monic f are enumerated explicitly: scaling f by the (q-1)/2
    squares preserves the curve and by the (q-1)/2 nonsquares gives the
    quadratic twist (tau -> -tau), so the full sum is the symmetrized
    monic sum.  The weight makes S_0 = q^(2g-1), the mass of H_g(F_q).
    """
    hist, n_models = trace_histogram(q, g)
    denom = 2 * (q ** 3 - q)
    total = sum(m * (tau ** n + (-tau) ** n) for tau, m in hist.items())
    val, rem = divmod(total, denom)
    if rem:
        raise NonIntegerResult(
            f"brute-force S_{n}({q},{g}) = {total}/{denom} is not an integer"
        )
    return SnResult(
        n=n, q=q, g=g, value=val, method="brute_force",
        models_enumerated=n_models, weight_denominator=denom,
    )


# ---------------------------------------------------------------------------
# lower bounds on the normalized maximal trace a_q

@dataclass(frozen=True)
class LowerBound:
    n: int
    q: int
    g: int
    s_value: int
    a_q: float
    count_bound: int  # ceil(1 + q + a_q sqrt(q))

    def a_q_power_exceeds(self, threshold: Fraction) -> bool:
        """Exact test a_q >= threshold, done as S_n >= threshold^n * q^(2g-1+n/2)
        with rational arithmetic (n/2 is an integer times sqrt factors avoided
        by comparing even powers)."""
        # a_q^n = S / q^(2g-1+n/2); compare S^2 vs threshold^(2n) q^(2(2g-1)+n)
        lhs = Fraction(self.s_value) ** 2
        rhs = threshold ** (2 * self.n) * Fraction(self.q) ** (2 * (2 * self.g - 1) + self.n)
        return lhs >= rhs


def lower_bound_a(n: int, q: int, g: int, source: str = "closed_form") -> LowerBound:
    if source == "closed_form":
        s = S_closed_form(n, q, g)
    elif source == "brute_force":
        s = S_bruteforce(n, q, g)
    else:
        raise ValueError(f"unknown source {source!r}")
    a_q = (s.value / q ** (2 * g - 1 + n // 2)) ** (1.0 / n)
    bound = 1 + q + a_q * math.sqrt(q)
    return LowerBound(n=n, q=q, g=g, s_value=s.value, a_q=a_q,
                      count_bound=math.ceil(bound))


# ---------------------------------------------------------------------------
# geometric classes (Fbar_q-isomorphism grouping of models)

@dataclass
class GeometricClass:
    representative: tuple
    members: list  # list of (coeff tuple, tau)

    def s_n(self, n: int, q: int) -> Fraction:
        # members are the monic models; the tau <-> -tau symmetrization
        # accounts for all leading coefficients (see S_bruteforce)
        denom = 2 * (q ** 3 - q)
        return Fraction(
            sum(tau ** n + (-tau) ** n for _, tau in self.members), denom
        )


def _all_monic_squarefree(ctx, g):
    out = []
    q = ctx.q
    for d in (2 * g + 1, 2 * g + 2):
        for low in range(q ** d):
            coeffs = []
            t = low
            for _ in range(d):
                coeffs.append(t % q)
                t //= q
            f = coeffs + [1]
            if P.is_squarefree(ctx, f):
                out.append(tuple(f))
    return out


def _primitive_element(ctx):
    q = ctx.q
    for a in range(2, q):
        order = 1
        cur = a
        while cur != 1:
            cur = ctx.mul(cur, a)
            order += 1
        if order == q - 1:
            return a
    raise AssertionError("no primitive element found")  # pragma: no cover


def _binary_form_transform(ctx, f, deg, mat):
    """Binary form F(X, Z) = Z^deg f(X/Z) composed with mat = [[a,b],[c,d]]:
    returns the dehomogenized coefficient list of F(aX+bZ, cX+dZ)."""
    a, b, c, d = mat
    # F = sum_i f_i X^i Z^(deg-i); after substitution collect coefficients
    out = [0] * (deg + 1)
    # precompute (aX+bZ)^i and (cX+dZ)^(deg-i) coefficient arrays in X
    pow1 = [[1]]
    for _ in range(deg):
        prev = pow1[-1]
        nxt = [0] * (len(prev) + 1)
        for j, v in enumerate(prev):
            nxt[j] = ctx.add(nxt[j], ctx.mul(v, b))
            nxt[j + 1] = ctx.add(nxt[j + 1], ctx.mul(v, a))
        pow1.append(nxt)
    pow2 = [[1]]
    for _ in range(deg):
        prev = pow2[-1]
        nxt = [0] * (len(prev) + 1)
        for j, v in enumerate(prev):
            nxt[j] = ctx.add(nxt[j], ctx.mul(v, d))
            nxt[j + 1] = ctx.add(nxt[j + 1], ctx.mul(v, c))
        pow2.append(nxt)
    for i in range(deg + 1):
        fi = f[i] if i < len(f) else 0
        if not fi:
            continue
        t1 = pow1[i]
        t2 = pow2[deg - i]
        for j1, v1 in enumerate(t1):
            if not v1:
                continue
            w = ctx.mul(fi, v1)
            for j2, v2 in enumerate(t2):
                if v2:
                    out[j1 + j2] = ctx.add(out[j1 + j2], ctx.mul(w, v2))
    return out


def _orbit_of(ctx, f, g):
    """All monic models projectively equivalent to f over F_q: the orbit of
    the attached binary form under PGL_2(F_q), dehomogenized and monicized.

    BFS from the generators x -> x+1, x -> lambda*x (lambda primitive) and
    x -> 1/x, which generate PGL_2 over any finite field.
    """
    deg = 2 * g + 2
    lam = _primitive_element(ctx)

    def normalize(h):
        h = P.monic(ctx, P.trim(list(h)))
        return tuple(h)

    def shift(h):
        return P.compose(ctx, list(h), [1, 1])

    def scale(h):
        out = []
        m = 1
        for c in h:
            out.append(ctx.mul(c, m))
            m = ctx.mul(m, lam)
        return out

    def invert(h):
        form = list(h) + [0] * (deg + 1 - len(h))
        return list(reversed(form))

    start = normalize(f)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for h in frontier:
            for gen in (shift, scale, invert):
                img = normalize(gen(list(h)))
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return seen


def _proj_roots(ctx_big, embed, f, deg):
    """Roots in P^1(F_{q^M}) of the degree-`deg` binary form attached to f,
    with None standing for the point at infinity."""
    fb = [embed(c) for c in f]
    rts = []
    rem = list(fb)
    for r in P.roots(ctx_big, fb):
        rts.append(r)
    if P.degree(f) < deg:
        rts.append(None)
    return rts


def _cross_ratio(ctx, a, b, c, d):
    """(a-c)(b-d) / ((a-d)(b-c)) with None = infinity; for four distinct
    projective points the value is finite and not 0 or 1."""

    def diff(u, v):
        # u - v with infinities cancelling against the matching factor
        return None if (u is None or v is None) else ctx.sub(u, v)

    num1, num2 = diff(a, c), diff(b, d)
    den1, den2 = diff(a, d), diff(b, c)
    # each infinity appears in exactly one numerator and one denominator
    # factor; those two limits cancel
    if a is None:
        num1, den1 = 1, 1  # (a-c)/(a-d) -> 1
    if b is None:
        num2, den2 = 1, 1  # (b-d)/(b-c) -> 1
    if c is None:
        num1, den2 = 1, 1  # (a-c)/(b-c) -> 1
    if d is None:
        num2, den1 = 1, 1  # (b-d)/(a-d) -> 1
    return ctx.div(ctx.mul(num1, num2), ctx.mul(den1, den2))


def _minpoly_over_prime(big, lam):
    """Coefficient tuple of the minimal polynomial of lam over F_p, a
    representation-independent label for the conjugacy class of lam."""
    p = big.p
    orbit = [lam]
    cur = big.pow(lam, p)
    while cur != lam:
        orbit.append(cur)
        cur = big.pow(cur, p)
    poly = [1]
    for r in orbit:
        poly = P.mul(big, poly, [big.neg(r), 1])
    assert all(c < p for c in poly), "minimal polynomial must live in F_p"
    return tuple(poly)


def _crossratio_invariant(ctx, f, g):
    """Sorted multiset of minimal polynomials of the cross-ratios of all
    4-subsets of the branch locus: a PGL_2(Fbar_q) invariant of y^2 = f that
    does not depend on the splitting-field representation."""
    from itertools import combinations

    deg = 2 * g + 2
    m = _splitting_degree(ctx, f)
    big = make_field(ctx.p, ctx.k * m, cap=None)
    roots = _proj_roots(big, lambda c: c, list(f), deg)
    inv = []
    one = 1
    for a, b, c, d in combinations(roots, 4):
        lam = _cross_ratio(big, a, b, c, d)
        # close under the S_3 action on cross-ratios so the label does not
        # depend on the ordering inside the subset
        vals = {lam, big.div(one, lam), big.sub(one, lam)}
        vals.add(big.div(one, big.sub(one, lam)))
        vals.add(big.div(lam, big.sub(lam, one)))
        vals.add(big.div(big.sub(lam, one), lam))
        inv.append(tuple(sorted(_minpoly_over_prime(big, v) for v in vals)))
    return tuple(sorted(inv))


def _mobius_apply(ctx, mat, z):
    a, b, c, d = mat
    if z is None:
        if c == 0:
            return None
        return ctx.div(a, c)
    den = ctx.add(ctx.mul(c, z), d)
    if den == 0:
        return None
    return ctx.div(ctx.add(ctx.mul(a, z), b), den)


def _mobius_through(ctx, src, dst):
    """Matrix of the Mobius map sending src[i] -> dst[i] for three distinct
    projective points (None = infinity)."""

    def to_std(p0, p1, p2):
        # map (p0, p1, p2) -> (0, 1, infinity)
        # z -> ((z-p0)(p1-p2)) / ((z-p2)(p1-p0))
        # in matrix form; handle infinities by limits
        if p0 is None:
            # z -> (p1-p2)/(z-p2)
            return (0, ctx.sub(p1, p2), 1, ctx.neg(p2))
        if p1 is None:
            # z -> (z-p0)/(z-p2)
            return (1, ctx.neg(p0), 1, ctx.neg(p2))
        if p2 is None:
            # z -> (z-p0)/(p1-p0)
            return (1, ctx.neg(p0), 0, ctx.sub(p1, p0))
        return (
            ctx.sub(p1, p2),
            ctx.neg(ctx.mul(p0, ctx.sub(p1, p2))),
            ctx.sub(p1, p0),
            ctx.neg(ctx.mul(p2, ctx.sub(p1, p0))),
        )

    def inv2(m):
        a, b, c, d = m
        return (d, ctx.neg(b), ctx.neg(c), a)

    def mul2(m1, m2):
        a, b, c, d = m1
        e, f2, g2, h = m2
        return (
            ctx.add(ctx.mul(a, e), ctx.mul(b, g2)),
            ctx.add(ctx.mul(a, f2), ctx.mul(b, h)),
            ctx.add(ctx.mul(c, e), ctx.mul(d, g2)),
            ctx.add(ctx.mul(c, f2), ctx.mul(d, h)),
        )

    return mul2(inv2(to_std(*dst)), to_std(*src))


def _splitting_degree(ctx, f):
    m = 1
    for irr, _ in P.factor(ctx, list(f))[1]:
        d = P.degree(irr)
        m = m * d // math.gcd(m, d)
    return m


def _geometrically_isomorphic(ctx, f1, f2, g, root_cache=None):
    """Test whether y^2 = f1 and y^2 = f2 are Fbar_q-isomorphic by matching
    branch loci in a joint splitting field under a Mobius map.

    Only prime base fields: constants embed into every extension as-is.
    """
    if ctx.k != 1:
        raise NotImplementedError("geometric classes only over prime fields")
    deg = 2 * g + 2
    m1 = _splitting_degree(ctx, f1)
    m2 = _splitting_degree(ctx, f2)
    m = m1 * m2 // math.gcd(m1, m2)
    big = make_field(ctx.p, ctx.k * m, cap=None)
    embed = lambda c: c

    def rts(f):
        key = (tuple(f), m)
        if root_cache is not None and key in root_cache:
            return root_cache[key]
        val = _proj_roots(big, embed, list(f), deg)
        if root_cache is not None:
            root_cache[key] = val
        return val

    r1 = rts(f1)
    r2 = rts(f2)
    if len(r1) != len(r2):
        return False
    set2 = sorted(r2, key=lambda z: -1 if z is None else z)
    src = r1[:3]
    from itertools import permutations

    for dst in permutations(r2, 3):
        mat = _mobius_through(big, src, dst)
        image = sorted(
            (_mobius_apply(big, mat, z) for z in r1),
            key=lambda z: -1 if z is None else z,
        )
        if image == set2:
            return True
    return False


def geometric_classes(q: int, g: int):
    """Partition all monic squarefree models over F_q (prime, odd) by
    geometric isomorphism; the number of classes must equal q^(2g-1)."""
    ctx = _field_for_q(q)
    if ctx.k != 1 or q % 2 == 0:
        raise ValueError("geometric classes implemented for odd prime q")
    models = _all_monic_squarefree(ctx, g)
    index = {f: i for i, f in enumerate(models)}
    unassigned = set(models)
    orbits = []
    for f in models:
        if f not in unassigned:
            continue
        orb = _orbit_of(ctx, f, g)
        orb &= unassigned
        unassigned -= orb
        orbits.append(sorted(orb))
    # Merge orbits that are geometrically isomorphic without being
    # PGL_2(F_q)-related (exotic twists, Aut bigger than {1, iota}).  Every
    # geometric class contains exactly q^3 - q monic models (the class mass
    # sum_{C' in [C]} 1/#Aut = 1 times the model count per weighted class),
    # so full-size orbits are complete classes and only smaller orbits merge.
    full = q ** 3 - q
    done = [orb for orb in orbits if len(orb) == full]
    small = [orb for orb in orbits if len(orb) < full]
    # bucket by the cross-ratio invariant (a necessary condition computed
    # in each orbit's own splitting field) so the expensive joint-field
    # isomorphism test only runs inside a bucket
    buckets = {}
    for orb in small:
        buckets.setdefault(_crossratio_invariant(ctx, orb[0], g), []).append(orb)
    root_cache = {}
    for group in buckets.values():
        while group:
            cur = group.pop(0)
            total = len(cur)
            rest = []
            for other in group:
                if total < full and _geometrically_isomorphic(
                    ctx, cur[0], other[0], g, root_cache
                ):
                    cur = sorted(cur + other)
                    total += len(other)
                else:
                    rest.append(other)
            group = rest
            assert total == full, (
                f"merged class has {total} models, expected {full}"
            )
            done.append(cur)
    orbits = done
    expected = q ** (2 * g - 1)
    assert len(orbits) == expected, (
        f"{len(orbits)} geometric classes, expected {expected}"
    )
    classes = []
    for orb in orbits:
        members = []
        for f in orb:
            model_count = _count_odd_model(ctx, f)
            members.append((f, q + 1 - model_count))
        classes.append(GeometricClass(representative=orb[0], members=members))
    return classes


def _count_odd_model(ctx, f):
    n = 0
    for z in ctx.elements():
        n += 1 + ctx.chi(P.evaluate(ctx, list(f), z))
    if (len(f) - 1) % 2 == 1:
        n += 1
    elif ctx.chi(f[-1]) == 1:
        n += 2
    return n


def s_n_curve(cls: GeometricClass, n: int, q: int) -> int:
    val = cls.s_n(n, q)
    if val.denominator != 1:
        raise IntegralityViolation(
            f"s_{n} = {val} is not an integer for class {cls.representative}"
        )
    return int(val)
