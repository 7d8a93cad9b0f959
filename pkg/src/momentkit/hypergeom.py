"""Normalized hypergeometric character sums H(t, q; chi, eta).

H is the sum of chi(x) * conj(eta)(y) * psi(t(x) - t(y)) over tuples of
units with prod(x) = t * prod(y), scaled by (-1)^(m+n-1) / q^((m+n-1)/2).
The additive character is the canonical one.  Alongside the evaluators this
module houses the combinatorial classifiers for exceptional character
tuples (Kummer / Belyi / inverse-Belyi induced pairs).
"""

from collections import Counter
from dataclasses import dataclass
from itertools import product
from math import gcd

import numpy as np

from . import kernels
from .characters import MultChar, canonical_psi
from .errors import CtxMismatch, ShapeMismatch, ZeroArgument
from .field import FieldCtx


@dataclass(frozen=True)
class HyperSpec:
    """An (m, n) pair of character tuples over a common field."""

    chi_list: tuple[MultChar, ...]
    eta_list: tuple[MultChar, ...]

    def __post_init__(self):
        object.__setattr__(self, "chi_list", tuple(self.chi_list))
        object.__setattr__(self, "eta_list", tuple(self.eta_list))
        chars = self.chi_list + self.eta_list
        if not chars:
            raise ShapeMismatch("need at least one character")
        ctx = chars[0].ctx
        if any(c.ctx is not ctx for c in chars):
            raise CtxMismatch("all characters must share one field")

    @property
    def ctx(self) -> FieldCtx:
        return (self.chi_list + self.eta_list)[0].ctx

    @property
    def m(self) -> int:
        return len(self.chi_list)

    @property
    def n(self) -> int:
        return len(self.eta_list)


def _norm(m: int, n: int, q: int) -> float:
    return (-1.0) ** (m + n - 1) / q ** ((m + n - 1) / 2)


def hyper_sum(spec: HyperSpec, t: int) -> complex:
    """Evaluate H(t) by enumerating the defining sum.

    Costs O(q^(m+n-1)); the last tuple entry is solved from the product
    constraint and the remaining free entry is vectorized.
    """
    ctx = spec.ctx
    q = ctx.q
    if t % q == 0:
        raise ZeroArgument("H is defined for t != 0")
    m, n = spec.m, spec.n
    nv = m + n
    nu = q - 1
    psi_vals = canonical_psi(ctx).values()
    vals = [c.values() for c in spec.chi_list]
    vals += [c.conj().values() for c in spec.eta_list]
    # sign of each slot in both the product constraint and the psi argument
    signs = [1] * m + [-1] * n

    if nv == 1:
        x = t if m == 1 else ctx.inv(t)
        arg = x if signs[0] > 0 else ctx.neg(x)
        return _norm(m, n, q) * complex(vals[0][x] * psi_vals[arg])

    exp = ctx.exp_table
    logt = ctx.dlog(t)
    neg_tab = ctx.neg_vec(np.arange(q))
    lw = np.arange(nu)              # dlog of the vectorized free slot
    w_codes = exp[lw]
    s_last = signs[nv - 1]
    s_w = signs[nv - 2]

    total = 0j
    for fixed in product(range(nu), repeat=nv - 2):
        coef = 1.0 + 0j
        code_sum = 0
        log_sum = 0
        for i, li in enumerate(fixed):
            c = int(exp[li])
            coef *= vals[i][c]
            code_sum = ctx.add(code_sum, c if signs[i] > 0 else ctx.neg(c))
            log_sum += signs[i] * li
        ls = (s_last * (logt - log_sum - s_w * lw)) % nu
        solved = exp[ls]
        a = ctx.add_vec(np.full(nu, code_sum, dtype=np.int64),
                        w_codes if s_w > 0 else neg_tab[w_codes])
        a = ctx.add_vec(a, solved if s_last > 0 else neg_tab[solved])
        total += coef * np.sum(vals[nv - 2][w_codes] * vals[nv - 1][solved]
                               * psi_vals[a])
    return _norm(m, n, q) * complex(total)


_CONV_CACHE: dict[tuple[int, int, int], np.ndarray] = {}


def _conv_psi(ctx: FieldCtx, c1: MultChar, c2: MultChar) -> np.ndarray:
    """c[u] = sum_{x*y=u} c1(x) c2(y) psi(x+y), indexed by element code."""
    key = (id(ctx), c1.k, c2.k)
    if key not in _CONV_CACHE:
        _CONV_CACHE[key] = kernels.conv_psi_table(
            c1.values(), c2.values(), canonical_psi(ctx).values(),
            ctx.log_table, ctx.exp_table, ctx._digits, ctx._pow_p, ctx.p)
    return _CONV_CACHE[key]


def _check_22(spec: HyperSpec):
    if spec.m != 2 or spec.n != 2:
        raise ShapeMismatch("fast path requires m = n = 2")


def hyper_sum_fast_22(spec: HyperSpec, t: int) -> complex:
    """H(t) for m = n = 2 via cached multiplicative convolution tables."""
    _check_22(spec)
    ctx = spec.ctx
    q = ctx.q
    if t % q == 0:
        raise ZeroArgument("H is defined for t != 0")
    cx = _conv_psi(ctx, spec.chi_list[0], spec.chi_list[1])
    ce = _conv_psi(ctx, spec.eta_list[0], spec.eta_list[1])
    v = np.arange(1, q)
    tv = ctx.mul_vec(np.full(q - 1, t, dtype=np.int64), v)
    return -(q ** -1.5) * complex(np.sum(cx[tv] * np.conj(ce[v])))


def hyper_all_t(spec: HyperSpec) -> np.ndarray:
    """H(t) for every t, indexed by code; entry 0 is 0 (H undefined there).

    m = n = 2 only; O(q^2) after the cached convolution tables are built.
    """
    _check_22(spec)
    ctx = spec.ctx
    q = ctx.q
    cx = _conv_psi(ctx, spec.chi_list[0], spec.chi_list[1])
    ce = _conv_psi(ctx, spec.eta_list[0], spec.eta_list[1])
    v = np.arange(1, q)
    tv = ctx.mul_vec(v[:, None], v[None, :])
    out = np.zeros(q, dtype=np.complex128)
    out[1:] = -(q ** -1.5) * (cx[tv] @ np.conj(ce[v]))
    return out


def disjoint(spec: HyperSpec) -> bool:
    """True when no chi component equals any eta component."""
    eta_ks = {c.k for c in spec.eta_list}
    return all(c.k not in eta_ks for c in spec.chi_list)


def _full_root_multiset(ks, d: int, nu: int) -> bool:
    """Is the multiset ks the complete d-th-root set of some character tuple?

    Each character with a d-th root has exactly g = gcd(d, nu) of them; the
    multiset qualifies iff within every d-th-power class all g roots appear
    with one common multiplicity.
    """
    if len(ks) % d:
        return False
    g = gcd(d, nu)
    by_pow: dict[int, Counter] = {}
    for k in ks:
        by_pow.setdefault((k * d) % nu, Counter())[k] += 1
    for roots in by_pow.values():
        if len(roots) != g or len(set(roots.values())) != 1:
            return False
    return True


def _solset(a: int, alpha: int, nu: int):
    """All k with k*a = alpha (mod nu), or None if unsolvable."""
    g = gcd(a, nu)
    if alpha % g:
        return None
    k0 = (alpha // g) * pow(a // g, -1, nu // g) % (nu // g)
    return frozenset((k0 + j * (nu // g)) % nu for j in range(g))


def _belyi_pair(chi_ks, eta_ks, nu: int):
    """Smallest (a, b) making the pair Belyi-induced, or None.

    chi must be the solution set of chi^a = alpha or chi^b = beta with
    beta nontrivial, and eta the full solution set of eta^m = alpha*beta.
    Solution sets have no repeats, so duplicate entries disqualify a tuple.
    """
    m = len(chi_ks)
    if len(set(chi_ks)) != m or len(set(eta_ks)) != m:
        return None
    if gcd(m, nu) != m:
        return None  # x^m = gamma has gcd(m, nu) < m solutions
    gammas = {(k * m) % nu for k in eta_ks}
    if len(gammas) != 1:
        return None
    gamma = gammas.pop()
    chi_set = frozenset(chi_ks)
    for a in range(1, m):
        b = m - a
        for k_alpha in range(nu):
            k_beta = (gamma - k_alpha) % nu
            if k_beta == 0:
                continue
            sa = _solset(a, k_alpha, nu)
            sb = _solset(b, k_beta, nu)
            if sa is not None and sb is not None and sa | sb == chi_set:
                return (a, b)
    return None


def classify_exceptional(spec: HyperSpec) -> dict:
    """Detect Kummer / Belyi / inverse-Belyi induced character pairs.

    Returns {'kummer': d or None, 'belyi': (a, b) or None,
    'inverse_belyi': (a, b) or None} with the smallest witness of each kind.
    """
    nu = spec.ctx.q - 1
    chi_ks = [c.k for c in spec.chi_list]
    eta_ks = [c.k for c in spec.eta_list]
    m, n = spec.m, spec.n

    kummer = None
    for d in range(2, gcd(m, n) + 1):
        if gcd(m, n) % d == 0 and _full_root_multiset(chi_ks, d, nu) \
                and _full_root_multiset(eta_ks, d, nu):
            kummer = d
            break

    belyi = inverse_belyi = None
    if m == n and m > 0:
        belyi = _belyi_pair(chi_ks, eta_ks, nu)
        conj_chi = [(-k) % nu for k in chi_ks]
        conj_eta = [(-k) % nu for k in eta_ks]
        inverse_belyi = _belyi_pair(conj_eta, conj_chi, nu)

    return {"kummer": kummer, "belyi": belyi, "inverse_belyi": inverse_belyi}
