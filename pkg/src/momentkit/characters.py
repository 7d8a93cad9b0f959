"""Multiplicative and additive characters, Gauss and Jacobi sums.

Characters are evaluated in double-precision complex arithmetic through
precomputed root-of-unity tables indexed by discrete log, with the
convention chi(0) = 0 so that sums may iterate over the whole field.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CtxMismatch, FilterRequiresQuadExt
from .field import FieldCtx, QuadExtCtx


@dataclass(frozen=True)
class MultChar:
    """chi_k(x) = exp(2*pi*i * k * dlog(x) / (q-1)), chi(0) = 0."""

    ctx: FieldCtx
    k: int

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % (self.ctx.q - 1))

    @property
    def is_trivial(self) -> bool:
        return self.k == 0

    def __mul__(self, other: "MultChar") -> "MultChar":
        if other.ctx is not self.ctx:
            raise CtxMismatch("characters of different fields")
        return MultChar(self.ctx, self.k + other.k)

    def inverse(self) -> "MultChar":
        return MultChar(self.ctx, -self.k)

    def conj(self) -> "MultChar":
        return self.inverse()

    def order(self) -> int:
        n = self.ctx.q - 1
        from math import gcd

        return n // gcd(self.k, n)

    def __call__(self, x: int) -> complex:
        if x == 0:
            return 0j
        return complex(_unit_roots(self.ctx)[(self.k * self.ctx.dlog(x)) % (self.ctx.q - 1)])

    def values(self) -> np.ndarray:
        """Value table indexed by element code; entry 0 is 0."""
        ctx = self.ctx
        n = ctx.q - 1
        vals = np.zeros(ctx.q, dtype=np.complex128)
        vals[1:] = _unit_roots(ctx)[(self.k * ctx.log_table[1:]) % n]
        return vals


@dataclass(frozen=True)
class AddChar:
    """psi_a(x) = exp(2*pi*i * AbsTr(a*x) / p); a = 1 is the canonical psi."""

    ctx: FieldCtx
    a: int

    @property
    def is_trivial(self) -> bool:
        return self.a == 0

    def __call__(self, x: int) -> complex:
        ctx = self.ctx
        t = ctx.abs_trace(ctx.mul(self.a, x))
        return complex(np.exp(2j * np.pi * t / ctx.p))

    def values(self) -> np.ndarray:
        ctx = self.ctx
        tr = ctx.abs_trace_table()
        ax = ctx.mul_vec(np.full(ctx.q, self.a), np.arange(ctx.q))
        return np.exp(2j * np.pi * tr[ax] / ctx.p)


_ROOT_CACHE: dict[int, np.ndarray] = {}


def _unit_roots(ctx: FieldCtx) -> np.ndarray:
    key = id(ctx)
    if key not in _ROOT_CACHE:
        n = ctx.q - 1
        _ROOT_CACHE[key] = np.exp(2j * np.pi * np.arange(n) / n)
    return _ROOT_CACHE[key]


def trivial_char(ctx: FieldCtx) -> MultChar:
    return MultChar(ctx, 0)


def quadratic_char(ctx: FieldCtx) -> MultChar:
    assert ctx.q % 2 == 1, "quadratic character needs odd q"
    return MultChar(ctx, (ctx.q - 1) // 2)


def canonical_psi(ctx: FieldCtx) -> AddChar:
    return AddChar(ctx, 1)


def eval_char(char, x: int) -> complex:
    return char(x)


def gauss_sum(chi: MultChar, psi: AddChar) -> complex:
    if chi.ctx is not psi.ctx:
        raise CtxMismatch("character contexts differ")
    return complex(np.sum(chi.values() * psi.values()))


def jacobi_sum(chi1: MultChar, chi2: MultChar) -> complex:
    if chi1.ctx is not chi2.ctx:
        raise CtxMismatch("character contexts differ")
    ctx = chi1.ctx
    codes = np.arange(ctx.q)
    one_minus = ctx.add_vec(np.ones(ctx.q, dtype=np.int64), ctx.neg_vec(codes))
    return complex(np.sum(chi1.values()[codes] * chi2.values()[one_minus]))


def enumerate_chars(ctx: FieldCtx, *filters, base_q: int | None = None,
                    qctx: QuadExtCtx | None = None) -> list[MultChar]:
    """Characters of ctx^x in ascending-k order, restricted by filters.

    Filters: 'all', 'nontrivial', 'quadratic', 'trivial_on_base', 'regular'.
    The last two apply to the top field of a quadratic extension and need
    qctx (or base_q) to identify the subfield.
    """
    n = ctx.q - 1
    if qctx is not None:
        base_q = qctx.q
    ks = list(range(n))
    for f in filters:
        if f == "all":
            continue
        elif f == "nontrivial":
            ks = [k for k in ks if k != 0]
        elif f == "quadratic":
            ks = [k for k in ks if k == n // 2 and n % 2 == 0]
        elif f == "trivial_on_base":
            if base_q is None or ctx.q != base_q * base_q:
                raise FilterRequiresQuadExt(f"filter {f!r} needs a quadratic extension")
            # trivial on embed(F_q)^x, a subgroup of index q+1: k = 0 mod q-1
            ks = [k for k in ks if k % (base_q - 1) == 0]
        elif f == "regular":
            if base_q is None or ctx.q != base_q * base_q:
                raise FilterRequiresQuadExt(f"filter {f!r} needs a quadratic extension")
            # theta != theta o Frob, i.e. k*q != k mod q^2-1
            ks = [k for k in ks if (k * (base_q - 1)) % n != 0]
        else:
            raise ValueError(f"unknown filter {f!r}")
    return [MultChar(ctx, k) for k in ks]
