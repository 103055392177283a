"""Hyperelliptic curve models in both characteristics.

Odd characteristic: y^2 = f(x) with f squarefree.  Characteristic 2:
Artin-Schreier models y^2 + y = f(x) with f a rational function all of
whose poles (including infinity) have odd order; `make_as_model` performs
the substitutions y -> y + u that put an arbitrary f in this normal form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from . import polys as P
from .errors import (
    DegenerateFunction,
    DegreeTooSmall,
    EvenCharacteristic,
    MalformedRecord,
    NotSquarefree,
    WrongCharacteristic,
)
from .gf import FieldCtx, field_from_json, make_field


@dataclass(frozen=True)
class CurveSummary:
    genus: int
    count: int
    weierstrass_rational: int
    tau: int  # integer trace: count - q - 1

    def normalized_tau(self, q: int) -> float:
        return self.tau / math.sqrt(q)


class OddCharModel:
    """y^2 = f(x) over F_q with q odd, f squarefree of degree >= 3."""

    def __init__(self, ctx: FieldCtx, f):
        if ctx.p == 2:
            raise WrongCharacteristic("odd-characteristic model needs odd p")
        f = P.trim(list(f))
        if P.degree(f) < 3:
            raise DegreeTooSmall(f"deg f = {P.degree(f)} < 3")
        if not P.is_squarefree(ctx, f):
            raise NotSquarefree("f has a repeated factor")
        self.ctx = ctx
        self.f = f
        d = P.degree(f)
        self.genus = (d + 1) // 2 - 1

    def count_points(self) -> int:
        ctx = self.ctx
        n = 0
        for z in ctx.elements():
            n += 1 + ctx.chi(P.evaluate(ctx, self.f, z))
        if P.degree(self.f) % 2 == 1:
            n += 1
        elif ctx.chi(self.f[-1]) == 1:
            n += 2
        return n

    def rational_weierstrass_count(self) -> int:
        w = len(P.roots(self.ctx, self.f))
        if P.degree(self.f) % 2 == 1:
            w += 1
        return w

    def quadratic_twist(self) -> "OddCharModel":
        n = self.ctx.find_special("nonsquare")
        return OddCharModel(self.ctx, P.scale(self.ctx, n, self.f))

    def summary(self) -> CurveSummary:
        count = self.count_points()
        return CurveSummary(
            genus=self.genus,
            count=count,
            weierstrass_rational=self.rational_weierstrass_count(),
            tau=count - self.ctx.q - 1,
        )

    def to_json_dict(self):
        s = self.summary()
        return {
            "field": self.ctx.to_json_dict(),
            "model": "odd",
            "f": list(self.f),
            "genus": self.genus,
            "count": s.count,
            "weierstrass": s.weierstrass_rational,
        }

    def __repr__(self):
        return f"OddCharModel(q={self.ctx.q}, f={self.f})"


class ArtinSchreierModel:
    """y^2 + y = num/den over F_q with q even, all poles of odd order.

    Use make_as_model to build one from an arbitrary rational function.
    """

    def __init__(self, ctx: FieldCtx, num, den):
        if ctx.p != 2:
            raise WrongCharacteristic("Artin-Schreier model needs p = 2")
        num = P.trim(list(num))
        den = P.trim(list(den))
        num, den = _reduce_fraction(ctx, num, den)
        self.ctx = ctx
        self.num = num
        self.den = den
        self._den_factors = [fac for fac, _ in P.factor(ctx, den)[1]]
        self._den_mults = {
            tuple(fac): m for fac, m in P.factor(ctx, den)[1]
        }
        for fac in self._den_factors:
            if self._den_mults[tuple(fac)] % 2 == 0:
                raise ValueError("even-order finite pole: not in normal form")
        e_inf = P.degree(num) - P.degree(den)
        if e_inf > 0 and e_inf % 2 == 0:
            raise ValueError("even-order pole at infinity: not in normal form")
        self.genus = self._genus()

    def _genus(self) -> int:
        # g = -1 + sum over poles of d_j*(e_j + 1)/2
        total = 0
        for fac in self._den_factors:
            e = self._den_mults[tuple(fac)]
            total += P.degree(fac) * (e + 1)
        e_inf = P.degree(self.num) - P.degree(self.den)
        if e_inf > 0:
            total += e_inf + 1
        return -1 + total // 2

    def count_points(self) -> int:
        ctx = self.ctx
        n = 0
        for z in ctx.elements():
            dz = P.evaluate(ctx, self.den, z)
            if dz == 0:
                n += 1  # ramified: one point above a rational pole
            else:
                v = ctx.div(P.evaluate(ctx, self.num, z), dz)
                n += 2 if ctx.abs_trace(v) == 0 else 0
        e_inf = P.degree(self.num) - P.degree(self.den)
        if e_inf > 0:
            n += 1
        elif e_inf < 0:
            n += 2  # value 0 at infinity, trace 0
        else:
            c = ctx.div(self.num[-1], self.den[-1])
            n += 2 if ctx.abs_trace(c) == 0 else 0
        return n

    def rational_weierstrass_count(self) -> int:
        w = len(P.roots(self.ctx, self.den))
        if P.degree(self.num) > P.degree(self.den):
            w += 1
        return w

    def quadratic_twist(self) -> "ArtinSchreierModel":
        c = self.ctx.find_special("trace_one")
        num = P.add(self.ctx, self.num, P.scale(self.ctx, c, self.den))
        return ArtinSchreierModel(self.ctx, num, self.den)

    def summary(self) -> CurveSummary:
        count = self.count_points()
        return CurveSummary(
            genus=self.genus,
            count=count,
            weierstrass_rational=self.rational_weierstrass_count(),
            tau=count - self.ctx.q - 1,
        )

    def to_json_dict(self):
        s = self.summary()
        return {
            "field": self.ctx.to_json_dict(),
            "model": "as",
            "f": {"num": list(self.num), "den": list(self.den)},
            "genus": self.genus,
            "count": s.count,
            "weierstrass": s.weierstrass_rational,
        }

    def __repr__(self):
        return f"ArtinSchreierModel(q={self.ctx.q}, num={self.num}, den={self.den})"


def _reduce_fraction(ctx, num, den):
    if not den:
        raise ValueError("zero denominator")
    g = P.gcd(ctx, num, den)
    if P.degree(g) > 0:
        num = P.divmod_poly(ctx, num, g)[0]
        den = P.divmod_poly(ctx, den, g)[0]
    if den[-1] != 1:
        c = ctx.inv(den[-1])
        num = P.scale(ctx, c, num)
        den = P.scale(ctx, c, den)
    return num, den


def make_odd_model(ctx: FieldCtx, f) -> OddCharModel:
    return OddCharModel(ctx, f)


def make_as_model(ctx: FieldCtx, num, den=None) -> ArtinSchreierModel:
    """Normalize y^2 + y = num/den so every pole has odd order.

    Even-order poles are removed by the substitution y -> y + u, which
    replaces f by f + u^2 + u; the total pole order strictly drops each
    round, so the loop terminates.
    """
    if ctx.p != 2:
        raise WrongCharacteristic("Artin-Schreier model needs p = 2")
    num = P.trim(list(num))
    den = P.trim(list(den)) if den is not None else [1]
    num, den = _reduce_fraction(ctx, num, den)

    while True:
        changed = False
        # finite poles of even order
        for phi, e in P.factor(ctx, den)[1]:
            if e % 2 == 1:
                continue
            d = P.degree(phi)
            # leading residue R = num / (den / phi^e) mod phi
            cof = list(den)
            for _ in range(e):
                cof = P.divmod_poly(ctx, cof, phi)[0]
            r = _invmod(ctx, cof, phi)
            residue = P.mod(ctx, P.mul(ctx, num, r), phi)
            # s = sqrt(residue) in F_q[x]/phi : raise to q^d / 2
            s = P.pow_mod(ctx, residue, (ctx.q ** d) // 2, phi)
            # u = s / phi^(e/2);  f += u^2 + u
            phi_half = [1]
            for _ in range(e // 2):
                phi_half = P.mul(ctx, phi_half, phi)
            phi_full = P.mul(ctx, phi_half, phi_half)
            # common denominator den (phi_full divides den)
            den_over_full = list(den)
            for _ in range(e):
                den_over_full = P.divmod_poly(ctx, den_over_full, phi)[0]
            den_over_half = P.mul(ctx, den_over_full, phi_half)
            u2_num = P.mul(ctx, P.mul(ctx, s, s), den_over_full)
            u_num = P.mul(ctx, s, den_over_half)
            num = P.add(ctx, num, P.add(ctx, u2_num, u_num))
            num, den = _reduce_fraction(ctx, num, den)
            changed = True
            break
        if changed:
            continue
        # pole at infinity of even order
        e_inf = P.degree(num) - P.degree(den)
        if e_inf > 0 and e_inf % 2 == 0:
            c = ctx.div(num[-1], den[-1])
            s = ctx.sqrt(c)  # squaring is bijective in char 2
            u = P.shift([s], e_inf // 2)
            u_part = P.add(ctx, P.mul(ctx, u, u), u)
            num = P.add(ctx, num, P.mul(ctx, u_part, den))
            num, den = _reduce_fraction(ctx, num, den)
            changed = True
        if not changed:
            break

    if P.degree(den) == 0 and P.degree(num) <= 0:
        raise DegenerateFunction("f is constant after Artin-Schreier reduction")
    return ArtinSchreierModel(ctx, num, den)


def _invmod(ctx, f, m):
    """Inverse of f modulo m (extended Euclid)."""
    r0, r1 = list(m), P.mod(ctx, f, m)
    s0, s1 = [], [1]
    while r1:
        q, r = P.divmod_poly(ctx, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, P.sub(ctx, s0, P.mul(ctx, q, s1))
    if P.degree(r0) != 0:
        raise ValueError("not invertible")
    return P.scale(ctx, ctx.inv(r0[0]), P.mod(ctx, s0, m))


def serialize(model) -> str:
    """Canonical JSON record (sorted keys, no whitespace)."""
    return json.dumps(model.to_json_dict(), sort_keys=True, separators=(",", ":"))


def deserialize(text_or_dict):
    if isinstance(text_or_dict, str):
        try:
            rec = json.loads(text_or_dict)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(f"invalid JSON: {exc}") from exc
    else:
        rec = text_or_dict
    try:
        ctx = field_from_json(rec["field"])
        kind = rec["model"]
        if kind == "odd":
            model = OddCharModel(ctx, [int(c) for c in rec["f"]])
        elif kind == "as":
            model = ArtinSchreierModel(
                ctx,
                [int(c) for c in rec["f"]["num"]],
                [int(c) for c in rec["f"]["den"]],
            )
        else:
            raise MalformedRecord(f"unknown model kind {kind!r}")
    except MalformedRecord:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRecord(str(exc)) from exc
    except (NotSquarefree, DegreeTooSmall, WrongCharacteristic, EvenCharacteristic) as exc:
        raise MalformedRecord(str(exc)) from exc
    if model.genus != rec.get("genus", model.genus):
        raise MalformedRecord("genus mismatch in record")
    if "count" in rec and model.count_points() != rec["count"]:
        raise MalformedRecord("point-count mismatch in record")
    return model
