"""Exact arithmetic in F_q, q = p^k, in both parities of p.

Elements are represented as plain integers in [0, q): the element with
polynomial-basis coefficients (c0, c1, ..., c_{k-1}) is encoded as
c0 + c1*p + ... + c_{k-1}*p^{k-1}.  Integer order of the encodings is the
canonical enumeration order, so "first element such that ..." is always
well defined and reproducible.
"""

from __future__ import annotations

import math

from .errors import (
    CapExceeded,
    ContextMismatch,
    DivisionByZero,
    EvenCharacteristic,
    NotASquare,
    NotPrime,
    OddCharacteristic,
    WrongCharacteristic,
)

DEFAULT_CAP = 2 ** 20

# full add/mul tables are only built for fields small enough that the
# q^2-entry tables stay a few megabytes
_TABLE_Q_LIMIT = 1400
_CHI_TABLE_LIMIT = 2 ** 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# mod-p polynomial helpers used only for finding the canonical modulus
# (coefficient lists, constant term first)

def _pp_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pp_mulmod(f, g, mod, p):
    res = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                res[i + j] = (res[i + j] + a * b) % p
    # reduce by monic mod
    dm = len(mod) - 1
    while len(res) - 1 >= dm:
        c = res[-1]
        if c:
            off = len(res) - 1 - dm
            for i in range(dm + 1):
                res[off + i] = (res[off + i] - c * mod[i]) % p
        res.pop()
    return _pp_trim(res)


def _pp_powmod(f, e, mod, p):
    result = [1]
    base = list(f)
    while e:
        if e & 1:
            result = _pp_mulmod(result, base, mod, p)
        base = _pp_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _pp_gcd(f, g, p):
    f, g = list(f), list(g)
    while g:
        # f mod g, with g made monic on the fly
        inv_lead = pow(g[-1], p - 2, p)
        gm = [(c * inv_lead) % p for c in g]
        dm = len(gm) - 1
        r = list(f)
        while len(r) - 1 >= dm and r:
            c = r[-1]
            if c:
                off = len(r) - 1 - dm
                for i in range(dm + 1):
                    r[off + i] = (r[off + i] - c * gm[i]) % p
            r.pop()
            _pp_trim(r)
        f, g = g, r
    return f


def _pp_is_irreducible(f, p):
    """Rabin test: x^(p^k) == x mod f, and x^(p^(k/d)) != x for prime d|k."""
    k = len(f) - 1
    x = [0, 1]
    xq = _pp_powmod(x, p ** k, f, p)
    if _pp_trim(list(xq)) != [0, 1]:
        return False
    d = 2
    kk = k
    primes = set()
    while d * d <= kk:
        if kk % d == 0:
            primes.add(d)
            while kk % d == 0:
                kk //= d
        d += 1
    if kk > 1:
        primes.add(kk)
    for d in primes:
        xe = _pp_powmod(x, p ** (k // d), f, p)
        diff = list(xe) + [0] * (2 - len(xe))
        diff[1] = (diff[1] - 1) % p
        g = _pp_gcd(f, _pp_trim(diff), p)
        if len(g) > 1:
            return False
    return True


def _canonical_modulus(p: int, k: int):
    """Smallest monic irreducible of degree k, ordered by the integer
    encoding of its lower coefficients."""
    if k == 1:
        return (0, 1)  # prime-field convention: modulus "x"
    for idx in range(p ** k):
        coeffs = []
        t = idx
        for _ in range(k):
            coeffs.append(t % p)
            t //= p
        if coeffs[0] == 0:
            continue  # divisible by x
        f = coeffs + [1]
        if _pp_is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FieldCtx:
    """Immutable context for F_q = F_{p^k} with the canonical modulus."""

    def __init__(self, p: int, k: int, cap=DEFAULT_CAP):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if k < 1:
            raise ValueError("k must be >= 1")
        q = p ** k
        if cap is not None and q > cap:
            raise CapExceeded(f"q = {q} exceeds cap {cap}")
        self.p = p
        self.k = k
        self.q = q
        self.modulus = _canonical_modulus(p, k)
        # x^j mod modulus for j = k .. 2k-2, as encoded ints
        self._red = []
        if k > 1:
            xk = [(-c) % p for c in self.modulus[:k]]
            cur = list(xk)
            for _ in range(k - 1):
                self._red.append(self._encode_digits(cur))
                cur = [0] + cur  # multiply by x
                if len(cur) > k:
                    top = cur.pop()
                    if top:
                        for i in range(k):
                            cur[i] = (cur[i] + top * xk[i]) % p
        self._chi_table = None
        self._sqrt_table = None
        self._np_tables = {}

    # -- encoding -----------------------------------------------------------

    def _encode_digits(self, digits):
        v = 0
        for d in reversed(digits):
            v = v * self.p + d
        return v

    def coeffs(self, a: int):
        """Polynomial-basis coefficients of an encoded element, length k."""
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return out

    def encode(self, coeffs) -> int:
        if len(coeffs) != self.k:
            raise ValueError(f"expected {self.k} coefficients")
        v = 0
        for c in reversed(coeffs):
            if not 0 <= c < self.p:
                raise ValueError("coefficient out of range")
            v = v * self.p + c
        return v

    def elements(self):
        """All q elements in canonical order."""
        return range(self.q)

    # -- arithmetic on encoded ints ------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        p = self.p
        v, mult = 0, 1
        while a or b:
            v += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return v

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        p = self.p
        v, mult = 0, 1
        while a:
            v += ((p - a % p) % p) * mult
            a //= p
            mult *= p
        return v

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        p, k = self.p, self.k
        da = self.coeffs(a)
        db = self.coeffs(b)
        conv = [0] * (2 * k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    conv[i + j] += x * y
        # reduce degrees >= k using precomputed x^j tables
        low = [c % p for c in conv[:k]]
        for j in range(k, 2 * k - 1):
            c = conv[j] % p
            if c:
                rd = self.coeffs(self._red[j - k])
                for i in range(k):
                    low[i] = (low[i] + c * rd[i]) % p
        return self._encode_digits(low)

    def pow(self, a: int, e: int) -> int:
        if self.k == 1:
            if e < 0:
                return pow(a, e, self.p)  # raises on a == 0
            return pow(a, e, self.p)
        if e < 0:
            a = self.inv(a)
            e = -e
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("division by zero")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # -- characters ------------------------------------------------------------

    def chi(self, a: int) -> int:
        """Quadratic character: 0 at 0, +1 on nonzero squares, -1 otherwise."""
        if self.p == 2:
            raise EvenCharacteristic("quadratic character needs odd p")
        if self._chi_table is None and self.q <= _CHI_TABLE_LIMIT:
            table = [-1] * self.q
            table[0] = 0
            for r in range(1, self.q):
                table[self.mul(r, r)] = 1
            self._chi_table = table
        if self._chi_table is not None:
            return self._chi_table[a]
        if a == 0:
            return 0
        return 1 if self.pow(a, (self.q - 1) // 2) == 1 else -1

    def abs_trace(self, a: int) -> int:
        """Absolute trace to F_2 (p = 2 only), returned as 0 or 1."""
        if self.p != 2:
            raise OddCharacteristic("absolute trace needs p = 2")
        # sum of the Frobenius orbit lands in the prime field
        cur = a
        acc = 0
        for _ in range(self.k):
            acc = self.add(acc, cur)
            cur = self.mul(cur, cur)
        assert acc in (0, 1), "trace must land in the prime field F_2"
        return acc

    def find_special(self, kind: str) -> int:
        """First element in canonical order that is a nonsquare (odd p) or
        has absolute trace one (p = 2)."""
        if kind == "nonsquare":
            if self.p == 2:
                raise WrongCharacteristic("nonsquares need odd p")
            for a in range(self.q):
                if self.chi(a) == -1:
                    return a
        elif kind == "trace_one":
            if self.p != 2:
                raise WrongCharacteristic("trace-one elements need p = 2")
            for a in range(self.q):
                if self.abs_trace(a) == 1:
                    return a
        else:
            raise ValueError(f"unknown kind {kind!r}")
        raise AssertionError("search cannot fail in a field")  # pragma: no cover

    def sqrt(self, a: int) -> int:
        """A square root; odd p returns the smaller of the two roots."""
        if self.p == 2:
            return self.pow(a, self.q // 2)
        if a == 0:
            return 0
        if self.chi(a) == -1:
            raise NotASquare(f"element {a} is not a square")
        if self.q <= _CHI_TABLE_LIMIT:
            if self._sqrt_table is None:
                table = [0] * self.q
                for r in range(self.q - 1, 0, -1):
                    table[self.mul(r, r)] = min(r, self.neg(r))
                self._sqrt_table = table
            return self._sqrt_table[a]
        r = self._tonelli_shanks(a)
        return min(r, self.neg(r))

    def _tonelli_shanks(self, a: int) -> int:
        q1 = self.q - 1
        s = 0
        m = q1
        while m % 2 == 0:
            m //= 2
            s += 1
        z = self.find_special("nonsquare")
        c = self.pow(z, m)
        x = self.pow(a, (m + 1) // 2)
        t = self.pow(a, m)
        while t != 1:
            i = 0
            tt = t
            while tt != 1:
                tt = self.mul(tt, tt)
                i += 1
            b = self.pow(c, 1 << (s - i - 1))
            x = self.mul(x, b)
            c = self.mul(b, b)
            t = self.mul(t, c)
            s = i
        return x

    # -- numpy helpers for vectorized scans -----------------------------------

    def np_tables(self):
        """(add, mul, chi_or_trace) tables as numpy arrays for hot scans.

        chi slot holds the quadratic character for odd p and the absolute
        trace for p = 2.  Only available for q <= _TABLE_Q_LIMIT.
        """
        import numpy as np

        if "add" not in self._np_tables:
            if self.q > _TABLE_Q_LIMIT:
                raise CapExceeded(f"q = {self.q} too large for full op tables")
            q = self.q
            if self.k == 1:
                idx = np.arange(q, dtype=np.int64)
                add = (idx[:, None] + idx[None, :]) % q
                mul = (idx[:, None] * idx[None, :]) % q
            else:
                add = np.empty((q, q), dtype=np.int64)
                mul = np.empty((q, q), dtype=np.int64)
                for a in range(q):
                    add[a] = [self.add(a, b) for b in range(q)]
                    mul[a] = [self.mul(a, b) for b in range(q)]
            if self.p == 2:
                ch = np.array([self.abs_trace(a) for a in range(q)], dtype=np.int64)
            else:
                ch = np.array([self.chi(a) for a in range(q)], dtype=np.int64)
            self._np_tables = {"add": add, "mul": mul, "chi": ch}
        return self._np_tables["add"], self._np_tables["mul"], self._np_tables["chi"]

    # -- misc -------------------------------------------------------------------

    def element(self, value) -> "FieldElement":
        return FieldElement(self, value % self.q if self.k == 1 else value)

    def to_json_dict(self):
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    def __eq__(self, other):
        return (
            isinstance(other, FieldCtx)
            and self.p == other.p
            and self.k == other.k
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        return f"FieldCtx(p={self.p}, k={self.k}, q={self.q})"


_field_cache = {}


def make_field(p: int, k: int, cap=DEFAULT_CAP) -> FieldCtx:
    """Canonical field context for F_{p^k}; cached and deterministic."""
    key = (p, k, cap)
    if key not in _field_cache:
        _field_cache[key] = FieldCtx(p, k, cap=cap)
    return _field_cache[key]


def field_from_json(rec) -> FieldCtx:
    ctx = make_field(int(rec["p"]), int(rec["k"]))
    if list(ctx.modulus) != list(rec["modulus"]):
        from .errors import MalformedRecord

        raise MalformedRecord("non-canonical modulus in field record")
    return ctx


class FieldElement:
    """Thin value wrapper around an encoded element; ctx does the work."""

    __slots__ = ("ctx", "value")

    def __init__(self, ctx: FieldCtx, value: int):
        if not 0 <= value < ctx.q:
            raise ValueError(f"encoded value {value} out of range for q={ctx.q}")
        self.ctx = ctx
        self.value = value

    def _check(self, other):
        if isinstance(other, int):
            if self.ctx.k == 1:
                return other % self.ctx.p
            raise ContextMismatch("bare ints only mix with prime fields")
        if self.ctx != other.ctx:
            raise ContextMismatch("elements from different fields")
        return other.value

    @property
    def coeffs(self):
        return self.ctx.coeffs(self.value)

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx.add(self.value, self._check(other)))

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self.value, self._check(other)))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.value, self._check(other)))

    def __truediv__(self, other):
        return FieldElement(self.ctx, self.ctx.div(self.value, self._check(other)))

    def __pow__(self, e):
        return FieldElement(self.ctx, self.ctx.pow(self.value, e))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.ctx == other.ctx and self.value == other.value
        if isinstance(other, int) and self.ctx.k == 1:
            return self.value == other % self.ctx.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.ctx.p, self.ctx.k))

    def __repr__(self):
        return f"FieldElement({self.value} in GF({self.ctx.q}))"

    def to_json(self):
        return self.coeffs


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Dispatch {add, sub, mul, div, pow} on wrapped elements."""
    if op == "pow":
        if not isinstance(b, int):
            raise ValueError("pow exponent must be an int")
        return a ** b
    if not isinstance(b, FieldElement) or a.ctx != b.ctx:
        raise ContextMismatch("elements from different fields")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")
