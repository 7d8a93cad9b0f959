"""Finite fields F_{p^f} with dense discrete-log tables.

Elements are encoded as integers in [0, q): the base-p digits of the code
are the coefficients of the residue polynomial, digit i = coefficient of
x^i.  Every context is immutable after construction and deterministic for
a fixed (p, f): the modulus is the lexicographically smallest monic
irreducible (coefficient tuples compared low-degree-first) and the
generator is the smallest element in the same tuple order whose
multiplicative order is q - 1.
"""

from functools import lru_cache

import numpy as np

from .errors import (
    CapExceeded,
    CtxMismatch,
    EvenCharacteristic,
    NotPrime,
    ZeroArgument,
    ZeroInverse,
)

FIELD_CAP = 1 << 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomial helpers over Z/p (coefficient lists, low degree first) --


def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, m, p):
    res = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    return _poly_rem(res, m, p)


def _poly_rem(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and _poly_trim(a):
        d = len(a) - 1
        if d < dm:
            break
        c = (a[-1] * inv_lead) % p
        for i in range(dm + 1):
            a[d - dm + i] = (a[d - dm + i] - c * m[i]) % p
        _poly_trim(a)
    return a


def _poly_powmod(a, e, m, p):
    result = [1]
    base = _poly_rem(a, m, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def _poly_gcd(a, b, p):
    a, b = list(a), list(b)
    while _poly_trim(b):
        a, b = b, _poly_rem(a, b, p)
    return _poly_trim(a)


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _poly_trim([(x - y) % p for x, y in zip(a, b)])


def _is_irreducible(m, p):
    """Rabin test: x^(p^f) == x mod m, and x^(p^(f/l)) - x coprime to m."""
    f = len(m) - 1
    if f == 1:
        return True
    x = [0, 1]
    xq = _poly_powmod(x, p**f, m, p)
    if _poly_trim(_poly_sub(xq, x, p)):
        return False
    for ell in prime_factors(f):
        xe = _poly_powmod(x, p ** (f // ell), m, p)
        g = _poly_gcd(_poly_sub(xe, x, p), m, p)
        if len(g) != 1:
            return False
    return True


def smallest_irreducible(p: int, f: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree f over Z/p."""
    if f == 1:
        return (0, 1)
    # iterate non-leading coefficient tuples (c_0, ..., c_{f-1}) in lex order
    from itertools import product

    for coeffs in product(range(p), repeat=f):
        m = list(coeffs) + [1]
        if _is_irreducible(m, p):
            return tuple(m)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldCtx:
    """Immutable context for F_q, q = p^f, with exp/log tables."""

    def __init__(self, p: int, f: int):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if f < 1:
            raise CapExceeded(f"degree must be >= 1, got {f}")
        q = p**f
        if q > FIELD_CAP:
            raise CapExceeded(f"q = {q} exceeds cap {FIELD_CAP}")
        self.p = p
        self.f = f
        self.q = q
        self.modulus = smallest_irreducible(p, f)

        # digit table: digits[x, i] = coefficient of x^i
        codes = np.arange(q, dtype=np.int64)
        digits = np.empty((q, f), dtype=np.int64)
        rem = codes.copy()
        for i in range(f):
            digits[:, i] = rem % p
            rem //= p
        self._digits = digits
        self._pow_p = np.array([p**i for i in range(f)], dtype=np.int64)

        self.gen = self._find_generator()
        self._build_log_tables()

    # -- construction helpers --

    def _mul_raw(self, a: int, b: int) -> int:
        """Field multiplication via polynomial arithmetic (table-free)."""
        pa = [int(c) for c in self._digits[a]]
        pb = [int(c) for c in self._digits[b]]
        r = _poly_mulmod(_poly_trim(pa), _poly_trim(pb), list(self.modulus), self.p)
        return self._encode_poly(r)

    def _encode_poly(self, coeffs) -> int:
        return int(sum(c * self.p**i for i, c in enumerate(coeffs)))

    def _pow_raw(self, a: int, e: int) -> int:
        r, b = 1, a
        while e:
            if e & 1:
                r = self._mul_raw(r, b)
            b = self._mul_raw(b, b)
            e >>= 1
        return r

    def _find_generator(self) -> int:
        n = self.q - 1
        factors = prime_factors(n) if n > 1 else []
        # candidates in coefficient-tuple lex order
        for tup in sorted(range(1, self.q), key=lambda x: tuple(self._digits[x])):
            if all(self._pow_raw(tup, n // ell) != 1 for ell in factors):
                return tup
        raise AssertionError("no generator found")  # unreachable

    def _build_log_tables(self):
        n = self.q - 1
        exp = np.empty(n, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self._mul_raw(x, self.gen)
        assert x == 1, "generator order mismatch"
        self.exp_table = exp
        self.log_table = log

    # -- scalar arithmetic --

    def add(self, a: int, b: int) -> int:
        d = (self._digits[a] + self._digits[b]) % self.p
        return int(d @ self._pow_p)

    def neg(self, a: int) -> int:
        d = (-self._digits[a]) % self.p
        return int(d @ self._pow_p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        n = self.q - 1
        return int(self.exp_table[(self.log_table[a] + self.log_table[b]) % n])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroInverse("0 has no inverse")
        n = self.q - 1
        return int(self.exp_table[(-self.log_table[a]) % n])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroInverse("0 has no inverse")
            return 0 if e else 1
        n = self.q - 1
        return int(self.exp_table[(self.log_table[a] * e) % n])

    def dlog(self, a: int) -> int:
        if a == 0:
            raise ZeroArgument("dlog(0) undefined")
        return int(self.log_table[a])

    # -- vectorized arithmetic on code arrays --

    def add_vec(self, a, b):
        d = (self._digits[a] + self._digits[b]) % self.p
        return d @ self._pow_p

    def neg_vec(self, a):
        d = (-self._digits[a]) % self.p
        return d @ self._pow_p

    def mul_vec(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        n = self.q - 1
        out = self.exp_table[(self.log_table[a] + self.log_table[b]) % n]
        return np.where((a == 0) | (b == 0), 0, out)

    # -- structure maps --

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self._digits[a])

    def from_coeffs(self, coeffs) -> int:
        return int(sum((c % self.p) * self.p**i for i, c in enumerate(coeffs)))

    def frobenius(self, a: int) -> int:
        """x -> x^p."""
        return self.pow(a, self.p)

    def abs_trace(self, a: int) -> int:
        """Trace down to Z/p, returned as an integer in [0, p)."""
        t, x = 0, a
        for _ in range(self.f):
            t = self.add(t, x)
            x = self.frobenius(x)
        assert t < self.p
        return t

    def abs_trace_table(self):
        if not hasattr(self, "_abs_tr"):
            self._abs_tr = np.array(
                [self.abs_trace(x) for x in range(self.q)], dtype=np.int64
            )
        return self._abs_tr

    def epsilon(self) -> int:
        """Canonical non-square: the generator itself (q odd)."""
        if self.p == 2:
            raise EvenCharacteristic("no non-square in characteristic 2")
        return self.gen

    def is_square(self, a: int) -> bool:
        if a == 0:
            return True
        return self.dlog(a) % 2 == 0

    def sqrt(self, a: int):
        """A square root of a, or None; canonical root has the smaller dlog."""
        if self.p == 2:
            raise EvenCharacteristic("use Frobenius inverse in characteristic 2")
        if a == 0:
            return 0
        k = self.dlog(a)
        if k % 2:
            return None
        n = self.q - 1
        r1 = int(self.exp_table[k // 2])
        r2 = int(self.exp_table[(k // 2 + n // 2) % n])
        return r1 if self.dlog(r1) <= self.dlog(r2) else r2

    def __repr__(self):
        return f"FieldCtx(p={self.p}, f={self.f})"


def make_field(p: int, f: int = 1) -> FieldCtx:
    return _make_field_cached(p, f)


@lru_cache(maxsize=None)
def _make_field_cached(p: int, f: int) -> FieldCtx:
    return FieldCtx(p, f)


def arith(op: str, ctx: FieldCtx, *operands):
    """Dispatch {add, mul, inv, pow} with context checking."""
    if op == "add":
        return ctx.add(*operands)
    if op == "mul":
        return ctx.mul(*operands)
    if op == "inv":
        return ctx.inv(*operands)
    if op == "pow":
        return ctx.pow(*operands)
    raise CtxMismatch(f"unknown op {op!r}")


class QuadExtCtx:
    """F_q together with F_{q^2} and the canonical embedding.

    eps is the canonical non-square of F_q^x, omega an element of the
    extension with omega^2 = embed(eps); omega^q = -omega follows.
    """

    def __init__(self, p: int, f: int):
        self.base = make_field(p, f)
        self.ext = make_field(p, 2 * f)
        if p == 2:
            raise EvenCharacteristic("quadratic extension machinery needs odd q")
        self.q = self.base.q
        self._build_embedding()
        self.eps = self.base.epsilon()
        self._pick_omega()

    def _build_embedding(self):
        base, ext = self.base, self.ext
        q = self.q
        n2 = ext.q - 1
        # roots of the base modulus lie in the order-(q-1) subgroup of ext^x
        subgroup = [0] + [int(ext.exp_table[(k * (q + 1)) % n2]) for k in range(q - 1)]
        mod = base.modulus
        roots = []
        for r in subgroup:
            acc, xp = 0, 1
            for c in mod:
                if c:
                    acc = ext.add(acc, ext.mul(c % base.p, xp))
                xp = ext.mul(xp, r)
            if acc == 0:
                roots.append(r)
        assert roots, "base modulus has no root in the quadratic extension"
        r = min(roots, key=lambda x: tuple(ext._digits[x]))
        table = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            acc, xp = 0, 1
            for c in base.coeffs(a):
                if c:
                    acc = ext.add(acc, ext.mul(c, xp))
                xp = ext.mul(xp, r)
            table[a] = acc
        self.embed_table = table
        self._unembed = {int(v): i for i, v in enumerate(table)}

    def _pick_omega(self):
        ext = self.ext
        e = ext.dlog(self.embed(self.eps))
        assert e % 2 == 0
        n2 = ext.q - 1
        w1 = int(ext.exp_table[e // 2])
        w2 = int(ext.exp_table[(e // 2 + n2 // 2) % n2])
        w = w1 if ext.dlog(w1) <= ext.dlog(w2) else w2
        assert ext.pow(w, self.q) == ext.neg(w), "omega^q != -omega"
        assert w not in self._unembed, "omega lies in the base field"
        self.omega = w

    def embed(self, a: int) -> int:
        return int(self.embed_table[a])

    def unembed(self, x: int):
        """Base-field code of x, or None if x is outside embed(F_q)."""
        return self._unembed.get(x)

    def rel_trace(self, x: int) -> int:
        """Tr_{F_{q^2}/F_q}(x) = x + x^q, as a base-field code."""
        t = self.ext.add(x, self.ext.pow(x, self.q) if x else 0)
        b = self.unembed(t)
        assert b is not None
        return b

    def rel_norm(self, x: int) -> int:
        """N_{F_{q^2}/F_q}(x) = x^{1+q}, as a base-field code."""
        n = self.ext.pow(x, 1 + self.q) if x else 0
        b = self.unembed(n)
        assert b is not None
        return b

    def trace_norm(self, x: int) -> tuple[int, int, int]:
        """(relative trace, relative norm, absolute trace mod p) of x in F_{q^2}."""
        return self.rel_trace(x), self.rel_norm(x), self.ext.abs_trace(x)

    def solve_quadratic(self, b: int, c: int) -> tuple[int, int]:
        """Roots in F_{q^2} of x^2 + bx + c with b, c in F_q (p odd)."""
        base, ext = self.base, self.ext
        disc = base.sub(base.mul(b, b), base.mul(4 % base.p, c))
        ed = self.embed(disc)
        if ed == 0:
            sq = 0
        else:
            k = ext.dlog(ed)
            assert k % 2 == 0, "base-field element must be a square upstairs"
            sq = int(ext.exp_table[k // 2])
        mb = self.embed(base.neg(b))
        inv2 = self.embed(base.inv(2 % base.p))
        r1 = ext.mul(ext.add(mb, sq), inv2)
        r2 = ext.mul(ext.sub(mb, sq), inv2)
        return r1, r2

    def __repr__(self):
        return f"QuadExtCtx(q={self.q})"


@lru_cache(maxsize=None)
def quad_ext(p: int, f: int = 1) -> QuadExtCtx:
    return QuadExtCtx(p, f)


def odd_prime_powers(qmin: int, qmax: int) -> list[tuple[int, int]]:
    """All (p, f) with p odd prime and qmin <= p^f <= qmax, sorted by q."""
    out = []
    for q in range(max(qmin, 3), qmax + 1):
        if q % 2 == 0:
            continue
        for p in range(3, q + 1):
            if not is_prime(p):
                continue
            f, pf = 1, p
            while pf < q:
                pf *= p
                f += 1
            if pf == q:
                out.append((p, f))
                break
    return out
