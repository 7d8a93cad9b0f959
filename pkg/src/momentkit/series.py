"""Rational functions in u = q^(-s) and Laurent expansions in s.

LocalWeightExpr holds a ratio of polynomials in u with an optional u^k
prefactor; expansions substitute u = q^(-s0) * exp(-(s-s0) ln q) and divide
power series.  This is the bookkeeping layer for residues and orders of
vanishing of the local weight factors.
"""

from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import (DivisionByZeroExpr, EssentialSingularity,
                     InsufficientOrder, PoleAtOne)

_EPS = 1e-12


def _trim(c):
    c = list(c)
    while len(c) > 1 and abs(c[-1]) <= _EPS * max(1.0, max(abs(x) for x in c)):
        c.pop()
    return c


def _poly_add(a, b):
    n = max(len(a), len(b))
    return [ (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
             for i in range(n) ]


def _poly_mul(a, b):
    out = [0j] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_gcd(a, b):
    """Monic gcd with a floating-point tolerance; inputs trimmed."""
    a, b = _trim(a), _trim(b)
    while len(b) > 1 or abs(b[0]) > _EPS:
        if len(b) == 1:
            return [1.0 + 0j]
        # remainder of a by b
        r = list(a)
        while len(r) >= len(b) and len(_trim(r)) >= len(b):
            r = _trim(r)
            if len(r) < len(b):
                break
            coef = r[-1] / b[-1]
            shift = len(r) - len(b)
            for i, y in enumerate(b):
                r[shift + i] -= coef * y
            r.pop()
        a, b = b, _trim(r)
    return [x / a[-1] for x in a]


def _div_is_exact(a, b, quot, rtol=1e-10) -> bool:
    """Does b * quot reproduce a up to a relative tolerance?"""
    prod = _poly_mul(list(b), list(quot))
    scale = max([abs(x) for x in a] + [1.0])
    n = max(len(a), len(prod))
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = prod[i] if i < len(prod) else 0
        if abs(x - y) > rtol * scale:
            return False
    return True


def _poly_divexact(a, b):
    """Quotient a / b assuming exact divisibility (within tolerance)."""
    a = list(a)
    out = [0j] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        coef = a[len(b) - 1 + i] / b[-1]
        out[i] = coef
        for j, y in enumerate(b):
            a[i + j] -= coef * y
    return out


@dataclass(frozen=True)
class LocalWeightExpr:
    """u^k * num(u) / den(u) with u = q^(-s)."""

    q: float
    num: tuple
    den: tuple
    k: int = 0

    def __post_init__(self):
        num, den, k = list(self.num), list(self.den), self.k
        den = _trim(den)
        num = _trim(num)
        if len(den) == 1 and abs(den[0]) <= _EPS:
            raise DivisionByZeroExpr("denominator is identically zero")
        if not (len(num) == 1 and abs(num[0]) <= _EPS):
            # pull powers of u out of both polynomials into the prefactor
            while abs(num[0]) <= _EPS * max(abs(x) for x in num):
                num.pop(0)
                k += 1
            while abs(den[0]) <= _EPS * max(abs(x) for x in den):
                den.pop(0)
                k -= 1
            g = _poly_gcd(num, den)
            if len(g) > 1:
                n2 = _poly_divexact(num, g)
                d2 = _poly_divexact(den, g)
                # floats make the Euclid chain ill-conditioned near multiple
                # roots; only cancel when the division really is exact
                if _div_is_exact(num, g, n2) and _div_is_exact(den, g, d2):
                    num, den = n2, d2
        else:
            num, k = [0j], 0
        scale = den[0]
        num = [complex(x / scale) for x in num]
        den = [complex(x / scale) for x in den]
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", tuple(den))
        object.__setattr__(self, "k", k)

    # -- constructors --

    @classmethod
    def const(cls, q, c):
        return cls(q, (complex(c),), (1.0 + 0j,))

    @classmethod
    def u_power(cls, q, k):
        return cls(q, (1.0 + 0j,), (1.0 + 0j,), k)

    @classmethod
    def poly(cls, q, coeffs, k=0):
        return cls(q, tuple(complex(c) for c in coeffs), (1.0 + 0j,), k)

    # -- arithmetic --

    def _check(self, other):
        if abs(self.q - other.q) > _EPS:
            raise ValueError("mixed base q in expression arithmetic")

    def __add__(self, other):
        if not isinstance(other, LocalWeightExpr):
            other = LocalWeightExpr.const(self.q, other)
        self._check(other)
        k = min(self.k, other.k)
        a = [0j] * (self.k - k) + list(self.num)
        b = [0j] * (other.k - k) + list(other.num)
        num = _poly_add(_poly_mul(a, list(other.den)),
                        _poly_mul(b, list(self.den)))
        return LocalWeightExpr(self.q, tuple(num),
                               tuple(_poly_mul(list(self.den), list(other.den))), k)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return LocalWeightExpr(self.q, tuple(-x for x in self.num), self.den, self.k)

    def __sub__(self, other):
        if not isinstance(other, LocalWeightExpr):
            other = LocalWeightExpr.const(self.q, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LocalWeightExpr):
            other = LocalWeightExpr.const(self.q, other)
        self._check(other)
        return LocalWeightExpr(self.q,
                               tuple(_poly_mul(list(self.num), list(other.num))),
                               tuple(_poly_mul(list(self.den), list(other.den))),
                               self.k + other.k)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if not isinstance(other, LocalWeightExpr):
            other = LocalWeightExpr.const(self.q, other)
        self._check(other)
        if len(other.num) == 1 and abs(other.num[0]) <= _EPS:
            raise DivisionByZeroExpr("division by the zero expression")
        return LocalWeightExpr(self.q,
                               tuple(_poly_mul(list(self.num), list(other.den))),
                               tuple(_poly_mul(list(self.den), list(other.num))),
                               self.k - other.k)

    def __rtruediv__(self, other):
        return LocalWeightExpr.const(self.q, other) / self

    def flip_s(self):
        """The expression composed with s -> -s, i.e. u -> 1/u."""
        dn, dd = len(self.num) - 1, len(self.den) - 1
        return LocalWeightExpr(self.q,
                               tuple(reversed(self.num)),
                               tuple(reversed(self.den)),
                               -self.k - dn + dd)

    def eval(self, s):
        u = complex(self.q) ** (-complex(s))
        num = sum(c * u ** i for i, c in enumerate(self.num))
        den = sum(c * u ** i for i, c in enumerate(self.den))
        if abs(den) <= _EPS * max(1.0, max(abs(c) for c in self.den)):
            raise DivisionByZeroExpr(f"pole of expression at s = {s}")
        return u ** self.k * num / den


@dataclass(frozen=True)
class LaurentSeries:
    """Finite Laurent data sum_{n >= m} c_n (s - s0)^n, truncated."""

    s0: complex
    m: int
    coeffs: tuple

    @property
    def order_max(self) -> int:
        return self.m + len(self.coeffs) - 1

    def coeff(self, n: int) -> complex:
        if n < self.m:
            return 0j
        if n > self.order_max:
            raise InsufficientOrder(f"series truncated below order {n}")
        return self.coeffs[n - self.m]

    def eval(self, s) -> complex:
        t = complex(s) - self.s0
        return sum(c * t ** (self.m + i) for i, c in enumerate(self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return LaurentSeries(self.s0, self.m,
                                 tuple(c * other for c in self.coeffs))
        if abs(complex(self.s0) - complex(other.s0)) > _EPS:
            raise ValueError("series centered at different points")
        n = min(len(self.coeffs), len(other.coeffs))
        out = [0j] * n
        for i in range(n):
            for j in range(n - i):
                out[i + j] += self.coeffs[i] * other.coeffs[j]
        return LaurentSeries(self.s0, self.m + other.m, tuple(out))

    def __rmul__(self, other):
        return self.__mul__(other)


def _series_scale(coeffs):
    return max([abs(c) for c in coeffs] + [1e-300])


def expand_at(expr: LocalWeightExpr, s0, order: int = 6) -> LaurentSeries:
    """Laurent expansion of expr in (s - s0), through (s - s0)^order."""
    if not isinstance(expr, LocalWeightExpr):
        raise EssentialSingularity("only rational expressions are expandable")
    q = expr.q
    lnq = np.log(q)
    u0 = complex(q) ** (-complex(s0))
    # possible pole depth = multiplicity of u0 in den; take enough terms
    depth = len(expr.den)
    nterms = order + 2 * depth + 2
    # power series of u^j around s0: u0^j * exp(-j (s-s0) ln q)
    def upow(j):
        out = [u0 ** j]
        for i in range(1, nterms):
            out.append(out[-1] * (-j * lnq) / i)
        return out

    def poly_series(coeffs, k):
        out = [0j] * nterms
        for i, c in enumerate(coeffs):
            if c == 0:
                continue
            term = upow(i + k)
            for t in range(nterms):
                out[t] += c * term[t]
        return out

    num = poly_series(expr.num, expr.k)
    den = poly_series(expr.den, 0)
    # strip common leading zeros (tolerance relative to series scale)
    ns, ds = _series_scale(num), _series_scale(den)
    vd = 0
    while vd < nterms and abs(den[vd]) <= 1e-11 * ds:
        vd += 1
    if vd >= nterms:
        raise DivisionByZeroExpr("denominator vanishes to high order")
    vn = 0
    while vn < nterms and abs(num[vn]) <= 1e-11 * ns:
        vn += 1
    num = num[vn:] + [0j] * vn
    den = den[vd:] + [0j] * vd
    # power-series division
    inv = [0j] * nterms
    inv[0] = 1 / den[0]
    for i in range(1, nterms):
        acc = 0j
        for j in range(1, i + 1):
            acc += den[j] * inv[i - j]
        inv[i] = -acc / den[0]
    out = [0j] * nterms
    for i in range(nterms):
        for j in range(nterms - i):
            out[i + j] += num[i] * inv[j]
    m = vn - vd
    keep = order - m + 1
    if keep <= 0:
        return LaurentSeries(complex(s0), order + 1, (0j,))
    return LaurentSeries(complex(s0), m, tuple(out[:keep]))


def residue_and_order(obj, s0=None, order: int = 6):
    """(order of vanishing, residue c_{-1}) at s0.

    Accepts a LocalWeightExpr (s0 required) or an existing LaurentSeries.
    The order is the index of the first nonzero coefficient; positive for
    zeros, negative for poles.
    """
    if isinstance(obj, LocalWeightExpr):
        if s0 is None:
            raise ValueError("s0 required for an expression")
        ser = expand_at(obj, s0, order=order)
    else:
        ser = obj
    scale = _series_scale(ser.coeffs)
    idx = None
    for i, c in enumerate(ser.coeffs):
        if abs(c) > 1e-9 * scale:
            idx = ser.m + i
            break
    if idx is None:
        idx = ser.order_max + 1  # zero to stated order
    residue = ser.coeff(-1) if ser.m <= -1 <= ser.order_max else 0j
    return idx, residue


def zeta_eval(s) -> complex:
    """Riemann zeta on Re s > -1, s != 1 (rationals-demo range)."""
    s = complex(s)
    if abs(s - 1) < 1e-12:
        raise PoleAtOne("zeta has its pole at s = 1")
    if s.real <= -1:
        raise ValueError("evaluation domain is Re s > -1")
    return complex(mpmath.zeta(mpmath.mpc(s.real, s.imag)))


def one_minus_u(q, shift: float = 0.0) -> LocalWeightExpr:
    """The factor 1 - q^(-shift) u, i.e. 1 - q^(-(s+shift))."""
    return LocalWeightExpr(q, (1.0, -float(q) ** (-shift)), (1.0,))


def geometric(q, c=1.0, shift: float = 0.0) -> LocalWeightExpr:
    """c q^(-shift) u / (1 - c q^(-shift) u), the tail sum over v >= 1."""
    a = complex(c) * float(q) ** (-shift)
    return LocalWeightExpr(q, (0j, a), (1.0, -a))
