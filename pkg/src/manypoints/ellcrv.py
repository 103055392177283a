"""Elliptic curves with prescribed trace and 2-torsion structure.

Legendre-style curves y^2 = x(x-a)(x-b) in odd characteristic, curves
y^2 + y = x + a/x with rational 4-torsion in characteristic 2, trace
targets from congruence conditions, the rational 2-isogeny image formula,
and deterministic curve searches driven by quadratic-character predicates.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from . import polys as P
from .errors import (
    NoAdmissibleT,
    SearchExhausted,
    SingularCurve,
    WrongCharacteristic,
)
from .gf import FieldCtx
from .hyperell import ArtinSchreierModel

_EXHAUSTIVE_Q_LIMIT = 4096


@dataclass(frozen=True)
class TraceTarget:
    q: int
    t: int

    @property
    def delta(self) -> int:
        return self.t * self.t - 4 * self.q


class CubicModel:
    """y^2 = cubic(x), monic or not, in odd characteristic."""

    def __init__(self, ctx: FieldCtx, cubic):
        if ctx.p == 2:
            raise WrongCharacteristic("cubic model needs odd p")
        cubic = P.trim(list(cubic))
        if P.degree(cubic) != 3:
            raise ValueError("cubic must have degree exactly 3")
        if not P.is_squarefree(ctx, cubic):
            raise SingularCurve("cubic has a repeated root")
        self.ctx = ctx
        self.cubic = cubic

    def count_points(self) -> int:
        ctx = self.ctx
        n = 1  # point at infinity
        for z in ctx.elements():
            n += 1 + ctx.chi(P.evaluate(ctx, self.cubic, z))
        return n

    def trace(self) -> int:
        """q + 1 - #E, the Frobenius trace."""
        return self.ctx.q + 1 - self.count_points()

    def rational_two_torsion_count(self) -> int:
        return len(P.roots(self.ctx, self.cubic))


class LegendreCurve(CubicModel):
    """y^2 = x(x-a)(x-b) with 0, a, b pairwise distinct: full 2-torsion."""

    def __init__(self, ctx: FieldCtx, a: int, b: int):
        if a == 0 or b == 0 or a == b:
            raise ValueError("need 0, a, b pairwise distinct")
        na, nb = ctx.neg(a), ctx.neg(b)
        cubic = P.mul(ctx, [0, 1], P.mul(ctx, [na, 1], [nb, 1]))
        super().__init__(ctx, cubic)
        self.a = a
        self.b = b

    def __repr__(self):
        return f"LegendreCurve(q={self.ctx.q}, a={self.a}, b={self.b})"


class Char2FourTorsionCurve:
    """y^2 + y = x + a/x over F_{2^k}; has a rational point of order 4."""

    def __init__(self, ctx: FieldCtx, a: int):
        if ctx.p != 2:
            raise WrongCharacteristic("needs p = 2")
        if a == 0:
            raise ValueError("a must be nonzero")
        self.ctx = ctx
        self.a = a
        self.model = ArtinSchreierModel(ctx, [a, 0, 1], [0, 1])

    def count_points(self) -> int:
        return self.model.count_points()

    def trace(self) -> int:
        """t with #E = q + 1 + t."""
        return self.count_points() - self.ctx.q - 1

    def __repr__(self):
        return f"Char2FourTorsionCurve(q={self.ctx.q}, a={self.a})"


def trace(curve) -> int:
    return curve.trace()


def largest_admissible_t(q: int, modulus: int, residues, coprime: bool = False) -> TraceTarget:
    """Largest t with t^2 <= 4q, t mod modulus in residues, optionally (t,q)=1."""
    residues = {r % modulus for r in residues}
    t = math.isqrt(4 * q)
    while t > 0:
        if t % modulus in residues and (not coprime or math.gcd(t, q) == 1):
            return TraceTarget(q=q, t=t)
        t -= 1
    raise NoAdmissibleT(f"no admissible t for q={q} mod {modulus} in {sorted(residues)}")


def find_curve_with_trace(ctx: FieldCtx, target: TraceTarget, square_conditions=(),
                          seed: int = 0) -> LegendreCurve:
    """First Legendre curve (canonical (a,b) order) with #E = q+1+t and all
    chi-predicates satisfied.

    Each condition is a callable cond(ctx, a, b) -> bool evaluated before
    the (comparatively expensive) point count.  Exhaustive scan for
    q <= 4096, seeded sampling with a 64*sqrt(q) budget above.
    """
    q = ctx.q
    want = q + 1 + target.t

    def candidate(a, b):
        if a == 0 or b == 0 or a == b:
            return None
        if not all(cond(ctx, a, b) for cond in square_conditions):
            return None
        curve = LegendreCurve(ctx, a, b)
        if curve.count_points() == want:
            return curve
        return None

    if q <= _EXHAUSTIVE_Q_LIMIT:
        counts = _legendre_count_table(ctx) if ctx.k == 1 else None
        for a in range(1, q):
            for b in range(1, q):
                if b == a:
                    continue
                if not all(cond(ctx, a, b) for cond in square_conditions):
                    continue
                if counts is not None:
                    if counts(a, b) != want:
                        continue
                    return LegendreCurve(ctx, a, b)
                curve = LegendreCurve(ctx, a, b)
                if curve.count_points() == want:
                    return curve
        raise SearchExhausted(f"no Legendre curve with trace {target.t} over F_{q}")

    rng = random.Random(seed)
    budget = 64 * math.isqrt(q)
    for _ in range(budget):
        a = rng.randrange(1, q)
        b = rng.randrange(1, q)
        curve = candidate(a, b)
        if curve is not None:
            return curve
    raise SearchExhausted(f"sampling budget exhausted for trace {target.t} over F_{q}")


def _legendre_count_table(ctx: FieldCtx):
    """Fast counting closure for prime q: numpy character sums."""
    import numpy as np

    q = ctx.q
    x = np.arange(q, dtype=np.int64)
    chi = np.array([ctx.chi(v) for v in range(q)], dtype=np.int64)
    base = 1 + q  # infinity plus the +1 for each z

    def count(a, b):
        vals = (x * ((x - a) % q) % q) * ((x - b) % q) % q
        return base + int(chi[vals].sum())

    return count


def two_isogeny_image(ctx: FieldCtx, b: int, c: int) -> CubicModel:
    """Image of y^2 = x(x-b)(x-c) under the 2-isogeny with kernel (0,0):
    y^2 = x^3 + 2(b+c)x^2 + (b-c)^2 x."""
    two = ctx.add(1, 1)
    a2 = ctx.mul(two, ctx.add(b, c))
    bm = ctx.sub(b, c)
    a1 = ctx.mul(bm, bm)
    return CubicModel(ctx, [0, a1, a2, 1])


def rational_two_torsion_count(curve: CubicModel) -> int:
    return curve.rational_two_torsion_count()


def find_char2_curve(ctx: FieldCtx, target: TraceTarget, trace_bit: int) -> Char2FourTorsionCurve:
    """First a (canonical order) with Tr(a) = trace_bit and #E = q+1+t."""
    if ctx.p != 2:
        raise WrongCharacteristic("needs p = 2")
    want = ctx.q + 1 + target.t
    for a in range(1, ctx.q):
        if ctx.abs_trace(a) != trace_bit:
            continue
        curve = Char2FourTorsionCurve(ctx, a)
        if curve.count_points() == want:
            return curve
    raise SearchExhausted(
        f"no curve y^2+y=x+a/x with trace {target.t}, Tr(a)={trace_bit} over F_{ctx.q}"
    )
