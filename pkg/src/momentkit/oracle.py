"""Direct numerical evaluation of the local fourth-moment integrals.

This module recomputes the dual weights of padic.m4_closed straight from
their defining four-fold integrals, without using any of the closed-form
lemmas: each family's support is enumerated over truncated p-adic residue
classes, per-class measure masses are multiplied in, and the valuation
tails beyond the enumerated window are added as exact geometric series.
The only discrepancy against the closed forms is therefore float roundoff,
and the reported error bound reflects that.

A small truncated p-adic arithmetic (TruncatedPadic) with explicit
precision tracking underlies the bookkeeping; it is also exposed for the
unipotent-transport cross-checks in the tests.
"""

from dataclasses import dataclass
from functools import lru_cache
from types import SimpleNamespace

import numpy as np
from sympy.ntheory.residue_ntheory import primitive_root

from .characters import AddChar
from .errors import (InsufficientPrecision, PoleHit, PrecisionLoss,
                     UnsupportedCase, UnsupportedChar, UnsupportedField)
from .padic import (Case1, Case2NS, Case2SC, Case3, LocalCharParam,
                    _tr_det_table, vol_K0, vol_K1)

_TOL = 1e-9


# ---------------------------------------------------------------------------
# truncated p-adic arithmetic


@dataclass(frozen=True)
class TruncatedPadic:
    """A nonzero p-adic number w^v * u with u known modulo p^prec.

    The unit residue is stored reduced; prec counts known unit digits and
    must stay positive, otherwise the valuation itself would be ambiguous.
    """

    p: int
    v: int
    unit: int
    prec: int

    def __post_init__(self):
        if self.prec < 1:
            raise PrecisionLoss("unit residue needs at least one digit")
        u = self.unit % self.p ** self.prec
        if u % self.p == 0:
            raise PrecisionLoss("unit part must be a unit")
        object.__setattr__(self, "unit", u)

    @classmethod
    def of(cls, p: int, num: int, den_pow: int = 0, prec: int = 8):
        """num / p^den_pow as a truncated value (num a nonzero integer)."""
        if num == 0:
            raise PrecisionLoss("zero has no finite valuation")
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        return cls(p, v - den_pow, num % p ** prec, prec)

    # -- arithmetic --

    def __mul__(self, other: "TruncatedPadic") -> "TruncatedPadic":
        k = min(self.prec, other.prec)
        return TruncatedPadic(self.p, self.v + other.v,
                              self.unit * other.unit % self.p ** k, k)

    def __add__(self, other: "TruncatedPadic") -> "TruncatedPadic":
        p = self.p
        absprec = min(self.v + self.prec, other.v + other.prec)
        v0 = min(self.v, other.v)
        mod = p ** (absprec - v0)
        total = (self.unit * p ** (self.v - v0)
                 + other.unit * p ** (other.v - v0)) % mod
        if total == 0:
            raise PrecisionLoss("cancellation exceeds the known digits")
        j = 0
        while total % p == 0:
            total //= p
            j += 1
        return TruncatedPadic(p, v0 + j, total, absprec - v0 - j)

    def __neg__(self) -> "TruncatedPadic":
        return TruncatedPadic(self.p, self.v, -self.unit, self.prec)

    def __sub__(self, other: "TruncatedPadic") -> "TruncatedPadic":
        return self + (-other)

    def inv(self) -> "TruncatedPadic":
        return TruncatedPadic(self.p, -self.v,
                              pow(self.unit, -1, self.p ** self.prec),
                              self.prec)

    @property
    def val(self) -> int:
        return self.v

    def unit_part(self, digits: int | None = None) -> int:
        """The unit residue modulo p^digits (digits defaults to prec)."""
        if digits is None:
            return self.unit
        if digits > self.prec:
            raise InsufficientPrecision(
                f"only {self.prec} digits known, {digits} requested")
        return self.unit % self.p ** digits


truncated_arith = SimpleNamespace(
    add=lambda x, y: x + y,
    mul=lambda x, y: x * y,
    inv=lambda x: x.inv(),
    val=lambda x: x.val,
    unit_part=lambda x, digits=None: x.unit_part(digits),
)


def transport_entries(h, n: int, variant: str):
    """Entries of the unipotent transport of a 2x2 matrix of truncated
    values: conjugation by n(w^-n) ('conj') or the one-sided transport
    n(w^-n) h n(-w^n) ('shift').  Used to cross-check the coordinate
    formulas of the depth-n integrator."""
    h1, h2, h3, h4 = h
    p = h1.p
    u = TruncatedPadic(p, -n, 1, max(x.prec for x in h) + 2 * n)
    if variant == "conj":
        w = -u
    elif variant == "shift":
        w = TruncatedPadic(p, n, -1, u.prec)
    else:
        raise ValueError("variant must be 'conj' or 'shift'")
    g1 = h1 + u * h3
    g3 = h3
    g4 = h4 + w * h3
    g2 = h2 + u * h4 + w * g1
    return g1, g2, g3, g4


# ---------------------------------------------------------------------------
# residue characters of level <= 2


@lru_cache(maxsize=None)
def _dlog2_table(p: int) -> np.ndarray:
    """Discrete logs on (Z/p^2)^x against a fixed primitive root."""
    g = primitive_root(p)
    if pow(g, p - 1, p * p) == 1:
        g += p
    tab = np.full(p * p, -1, dtype=np.int64)
    x = 1
    for k in range(p * (p - 1)):
        tab[x] = k
        x = x * g % (p * p)
    return tab


def _char2_values(p: int, k: int) -> np.ndarray:
    """Value table over Z/p^2 of the level-2 unit character of index k."""
    if k % p == 0:
        raise UnsupportedChar("index divisible by p is trivial on 1 + p")
    tab = _dlog2_table(p)
    out = np.zeros(p * p, dtype=np.complex128)
    mask = tab >= 0
    out[mask] = np.exp(2j * np.pi * k * tab[mask] / (p * (p - 1)))
    return out


def _chi_table(chi: LocalCharParam, p: int, L: int) -> np.ndarray:
    """chi-tilde over Z/p^L (0 at non-units).  L >= 2 when chi has level 2."""
    pl = p ** L
    x = np.arange(pl)
    if chi.ram2_k:
        if L < 2:
            raise InsufficientPrecision("level-2 character needs two digits")
        return _char2_values(p, chi.ram2_k)[x % (p * p)]
    out = np.where(x % p != 0, 1.0 + 0j, 0j)
    if chi.ram is not None:
        out = out * chi.ram.values()[x % p]
    return out


def _avg_unit(tab: np.ndarray, p: int) -> complex:
    """Mean of a unit-character table over the units it covers."""
    mask = np.arange(tab.shape[0]) % p != 0
    return complex(np.sum(tab[mask]) / np.count_nonzero(mask))


def _geom(x: complex, start: int) -> complex:
    """sum_{v >= start} x^v, raising near the radius of convergence."""
    if abs(1 - x) < _TOL or abs(x) >= 1:
        raise PoleHit("geometric tail does not converge at this s")
    return x ** start / (1 - x)


def _check_field(case):
    model = case.model
    if model.f != 1:
        raise UnsupportedField("the integrator needs a prime residue field")
    return model


# ---------------------------------------------------------------------------
# one-dimensional shells (families 1 and 3)


def _unit_shell(chi: LocalCharParam, p: int, twist: int | None = None) -> complex:
    """Integral of chi-tilde over the unit sphere, unit-normalized d^x
    measure, optionally twisted by psi(twist * u) on the mod-p residue."""
    J = max(1, chi.a)
    tab = _chi_table(chi, p, J)
    x = np.arange(p ** J)
    mask = x % p != 0
    vals = tab[mask]
    if twist is not None:
        psi = AddChar(_residue_ctx(p), 1).values()
        vals = vals * psi[(x[mask] * twist) % p]
    return complex(np.sum(vals)) / ((p - 1) * p ** (J - 1))


def _slot_integral(chi: LocalCharParam, p: int, w, start: int,
                   twist: int | None = None, nshells: int = 2) -> complex:
    """Integral over valuations >= start of chi(x)|x|^w d^x x; the first
    shell optionally carries the additive twist psi(twist * u) of its unit
    part (the twist is trivial on all deeper shells)."""
    x = chi.c * p ** (-complex(w))
    total = 0j
    plain = _unit_shell(chi, p)
    for v in range(start, start + nshells):
        shell = _unit_shell(chi, p, twist) if (twist is not None
                                               and v == start) else plain
        total += shell * x ** v
    total += plain * _geom(x, start + nshells)
    return total


@lru_cache(maxsize=None)
def _residue_ctx(p: int):
    from .field import make_field
    return make_field(p, 1)


# ---------------------------------------------------------------------------
# the per-family integrators


def _oracle_case1(case: Case1, chi: LocalCharParam, s):
    p = case.model.q
    f_unit = _unit_shell(chi, p)                       # slots 1 and 4
    ci = chi.inv()
    f2 = _slot_integral(ci, p, 0.5 - s, 0)             # slot 2 over o
    f3 = _slot_integral(ci, p, 0.5 - s, 1)             # slot 3 over p
    return (p + 1) * f_unit * f_unit * f2 * f3


def _oracle_case3(case: Case3, chi: LocalCharParam, s):
    model = case.model
    p = model.q
    # slots 1 and 4: chi over 1 + p, with |x| = 1 there
    J = max(chi.a, 2)
    tab = _chi_table(chi, p, J)
    classes = (1 + p * np.arange(p ** (J - 1))) % p ** J
    f1 = complex(np.sum(tab[classes])) / ((p - 1) * p ** (J - 1))
    ci = chi.inv()
    # slot 2: additive twist psi(-w^-1 x) on the unit shell, then plain
    f2 = _slot_integral(ci, p, 0.5 - s, 0, twist=(p - 1))
    # slot 3: psi(-w^-2 t x) over p; the first shell sees psi(-w^-1 t u)
    f3 = _slot_integral(ci, p, 0.5 - s, 1, twist=(-case.t) % p)
    return f1 * f1 * f2 * f3 / vol_K1(model)


def _oracle_case2sc(case: Case2SC, chi: LocalCharParam, s):
    qctx = case.qctx
    ctx = qctx.base
    p = ctx.q
    # per-slot unit tables averaged down to the mod-p residue
    def slot_table(c: LocalCharParam) -> np.ndarray:
        J = max(1, c.a)
        tab = _chi_table(c, p, J)
        out = np.zeros(p, dtype=np.complex128)
        for r in range(1, p):
            out[r] = np.sum(tab[r::p]) / p ** (J - 1)
        return out
    ci = chi.inv()
    tp = slot_table(chi)
    tm = slot_table(ci)
    avg_p = complex(np.sum(tp) / (p - 1))
    avg_m = complex(np.sum(tm) / (p - 1))
    # deep-slot factors: numeric shells plus exact geometric remainder
    def deep(c_val, w, avg):
        x = c_val * p ** (-complex(w))
        return avg * (x + x * x + _geom(x, 3))
    d_plus = deep(chi.c, 0.5 + s, avg_p)
    d_minus = deep(1.0 / chi.c, 0.5 - s, avg_m)
    # residue grid; index 0 in a slot means positive valuation there
    r = np.arange(p, dtype=np.int64)
    r1, r2, r3, r4 = (r.reshape(-1, 1, 1, 1), r.reshape(1, -1, 1, 1),
                      r.reshape(1, 1, -1, 1), r.reshape(1, 1, 1, -1))
    mul, add = ctx.mul_vec, ctx.add_vec
    det = add(mul(r1, r4), ctx.neg_vec(mul(r2, r3)))
    tr = add(r1, r4)
    det_b, tr_b = np.broadcast_arrays(det, tr)
    cmat = np.conj(_tr_det_table(qctx, case.theta.k))[tr_b, det_b]
    cmat = np.where(det_b == 0, 0j, cmat)
    scal = (r2 == 0) & (r3 == 0) & (r1 == r4) & (r1 != 0)
    cmat = np.where(scal & (det_b != 0), p - 1.0, cmat)

    def slot_vals(rr, tab, dfac):
        out = tab / (p - 1.0)
        out = out.astype(np.complex128)
        full = np.where(rr == 0, dfac, out[rr])
        return full
    v1 = slot_vals(r1, tp, d_plus)
    v4 = slot_vals(r4, tp, d_plus)
    v2 = slot_vals(r2, tm, d_minus)
    v3 = slot_vals(r3, tm, d_minus)
    total = np.sum(cmat * v1 * v2 * v3 * v4)
    return (p - 1.0) * complex(total)


def _oracle_case2ns(case: Case2NS, chi: LocalCharParam, s):
    p = case.model.q
    n = case.n
    a = chi.a
    s = complex(s)
    zeta1 = 1.0 / (1.0 - 1.0 / p)
    L = n + a
    m = max(L, 1)
    pm, pL, pn = p ** m, p ** L, p ** n

    # residue character of the family: quadratic at n = 1, level-2 data at 2
    if n == 1:
        ctx = _residue_ctx(p)
        xivals = np.array([0j] + [1.0 + 0j if ctx.is_square(u) else -1.0 + 0j
                                  for u in range(1, p)])
    else:
        xivals = _char2_values(p, case.xi2_k)
    inv_n = np.array([0] + [pow(x, -1, pn) if x % p else 0
                            for x in range(1, pn)], dtype=np.int64)

    chitab = _chi_table(chi, p, L)[:pL]
    chitab_m = _chi_table(chi.inv(), p, L)[:pL]

    x_ball = chi.c * p ** (-(0.5 + s))       # per-valuation factor, slots 1/4
    rho = (1.0 / chi.c) * p ** (s - 0.5)     # deep-shell ratio, slot 3
    if abs(x_ball) >= 1 or abs(1 - x_ball) < _TOL:
        raise PoleHit("slot-1/4 tail does not converge at this s")
    if abs(rho) >= 1 or abs(1 - rho) < _TOL:
        raise PoleHit("slot-3 tail does not converge at this s")

    # the g2 fiber integral as a function of the mod-p^L residue of
    # B := w^n * g2 - h2 (the part of g2 singular in the transport)
    h2_const = ((1 - 1.0 / p) / (1 - (1.0 / chi.c) * p ** (s - 0.5))
                if a == 0 else 0j)
    h2tab = np.zeros(pL, dtype=np.complex128)
    for b in range(pL):
        if b == 0:
            h2tab[b] = h2_const
            continue
        j = 0
        bb = b
        while bb % p == 0:
            bb //= p
            j += 1
        if j >= n:
            h2tab[b] = h2_const
        elif a <= n - j:
            h2tab[b] = chi.c ** (n - j) * chitab_m[(b // p ** j) % pL] \
                * p ** ((j - n) * (0.5 + s))

    pref = zeta1 ** 4 * p ** float(-n) / vol_K0(case.model, n)

    # cell tables over Z/p^L for the decoupled slot-1 and slot-4 factors:
    # value integrated over the cell, i.e. including the cell mass p^-L
    def cell_factors():
        fac = np.zeros(pL, dtype=np.complex128)
        for rr in range(1, pL):
            j = 0
            bb = rr
            while bb % p == 0:
                bb //= p
                j += 1
            if a == 2 and L - j == 1:
                continue                      # level-2 sum over the fiber: 0
            u = (rr // p ** j) % pL
            fac[rr] = chi.c ** j * p ** (j * (0.5 - s)) * chitab[u] / pL
        if a == 0:
            fac[0] = (1 - 1.0 / p) * _geom(x_ball, L)
        return fac
    afac = cell_factors()

    total = 0j
    cells = np.arange(pL, dtype=np.int64)
    if case.variant == "conj":
        # region of unit y3: coordinates (y3, A = h1 + y3, D = h4 - y3)
        y3 = np.array([y for y in range(pm) if y % p], dtype=np.int64)
        Y = y3.reshape(-1, 1, 1)
        A = cells.reshape(1, -1, 1)
        D = cells.reshape(1, 1, -1)
        h1 = (A - Y) % pL
        h4 = (D + Y) % pL
        mask = (h1 % p != 0) & (h4 % p != 0)
        xi = xivals[(h4 % pn) * inv_n[h1 % pn] % pn]
        b = (h4 - A) % pL
        g3fac = (1.0 / chi.c) ** n * p ** (n * (0.5 + s)) * chitab_m[y3 % pL]
        grid = np.where(mask, afac[A] * afac[D] * xi * h2tab[b], 0j)
        total += np.sum(grid * g3fac.reshape(-1, 1, 1)) * p ** float(-m)

        # regions of deeper y3 = p^w u3: everything else sits at valuation 0
        units_m = np.array([u for u in range(pm) if u % p], dtype=np.int64)
        h1g, h4g, u3g = np.meshgrid(units_m, units_m, units_m, indexing="ij")
        w0 = max(n + a, 1)
        shell_vals = []
        for w in range(1, w0 + 1):
            g1 = (h1g + p ** w * u3g) % pL
            g4 = (h4g - p ** w * u3g) % pL
            b = (h4g - h1g - p ** w * u3g) % pL
            xi = xivals[(h4g % pn) * inv_n[h1g % pn] % pn]
            g3fac = (1.0 / chi.c) ** (n + w) * p ** ((n + w) * (0.5 + s)) \
                * chitab_m[u3g % pL]
            shell = np.sum(chitab[g1] * chitab[g4] * xi * h2tab[b] * g3fac) \
                * p ** float(-3 * m - w)
            shell_vals.append(complex(shell))
        total += sum(shell_vals)
        total += shell_vals[-1] * _geom(rho, 1)
    else:
        # one-sided transport: g4 = h4 - w^2n y3 and the g2 fiber depends
        # on h4 alone (valuation -n exactly)
        h2fac_tab = np.zeros(pL, dtype=np.complex128)
        if a <= n:
            for u in range(pL):
                if u % p:
                    h2fac_tab[u] = chi.c ** n * chitab_m[u] \
                        * p ** (-n * (0.5 + s))
        units_m = np.array([u for u in range(pm) if u % p], dtype=np.int64)
        # unit-y3 region in coordinates (y3, A, h4)
        y3 = units_m.reshape(-1, 1, 1)
        A = cells.reshape(1, -1, 1)
        h4 = units_m.reshape(1, 1, -1)
        h1 = (A - y3) % pL
        mask = h1 % p != 0
        g4 = (h4 - p ** (2 * n) * y3) % pL
        xi = xivals[(h4 % pn) * inv_n[h1 % pn] % pn]
        g3fac = (1.0 / chi.c) ** n * p ** (n * (0.5 + s)) * chitab_m[y3 % pL]
        grid = np.where(mask, afac[A] * chitab[g4] * xi * h2fac_tab[h4 % pL],
                        0j)
        total += np.sum(grid * g3fac) * p ** float(-2 * m)
        # deeper y3 shells
        h1g, h4g, u3g = np.meshgrid(units_m, units_m, units_m, indexing="ij")
        w0 = max(n + a, 2 * n)
        shell_vals = []
        for w in range(1, w0 + 1):
            g1 = (h1g + p ** w * u3g) % pL
            g4 = (h4g - p ** (2 * n + w) * u3g) % pL
            xi = xivals[(h4g % pn) * inv_n[h1g % pn] % pn]
            g3fac = (1.0 / chi.c) ** (n + w) * p ** ((n + w) * (0.5 + s)) \
                * chitab_m[u3g % pL]
            shell = np.sum(chitab[g1] * chitab[g4] * xi
                           * h2fac_tab[h4g % pL] * g3fac) \
                * p ** float(-3 * m - w)
            shell_vals.append(complex(shell))
        total += sum(shell_vals)
        total += shell_vals[-1] * _geom(rho, 1)

    return pref * total


def oracle_m4(case, chi: LocalCharParam | None = None, s=0.0, N: int = 8):
    """The dual weight by direct integration: (value, error bound).

    Valuation windows are enumerated and the remainders resummed exactly,
    so the error bound only covers float roundoff.  Requires a prime
    residue field and Re s strictly inside (-1/2, 1/2).
    """
    if chi is None:
        chi = LocalCharParam()
    model = _check_field(case)
    if N < 4:
        raise ValueError("N must be at least 4")
    s = complex(s)
    if abs(s.real) >= 0.5 - 1e-6:
        raise PoleHit("Re s must lie strictly inside (-1/2, 1/2)")
    if isinstance(case, Case1):
        val = _oracle_case1(case, chi, s)
    elif isinstance(case, Case2NS):
        val = _oracle_case2ns(case, chi, s)
    elif isinstance(case, Case2SC):
        val = _oracle_case2sc(case, chi, s)
    elif isinstance(case, Case3):
        val = _oracle_case3(case, chi, s)
    else:
        raise UnsupportedCase(f"unknown case {type(case).__name__}")
    bound = 1e-9 * (1.0 + abs(val))
    return val, bound


# ---------------------------------------------------------------------------
# Kirillov-model indicators


def whittaker_indicators(case, y: TruncatedPadic, u: int = 1) -> int:
    """Indicator of the coset supporting the normalized Kirillov function.

    Case3 vectors live on w^-1 (1 + p); the depth-zero supercuspidal
    family has one function per unit class u, supported on w^-1 u (1 + p).
    """
    if isinstance(case, Case3):
        target = 1
    elif isinstance(case, Case2SC):
        target = u % y.p
        if target == 0:
            raise ValueError("u must be a unit residue")
    else:
        raise UnsupportedCase("indicators exist for the supercuspidal "
                              "families only")
    if y.v != -1:
        return 0
    return int(y.unit_part(1) == target % y.p)
