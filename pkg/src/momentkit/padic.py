"""Local weight functions at a finite place: closed forms.

Everything here is exact arithmetic in q = p^f: volumes of the standard
congruence subgroups, the third-moment weights M3, and the dual fourth-moment
weights M4 for the four test-function families (indicator of K0[p], the
twisted K0[p^n] function, the depth-zero supercuspidal matrix coefficient,
and the simple-supercuspidal K1[p] function).  The independent numerical
integrator lives in oracle.py; agreement between the two is the main
correctness check.

Conventions: m4 values are evaluated at the point 1/2 + s, i.e. the weight
|x1 x4|^(1/2+s) |x2 x3|^(1/2-s); s = 0 is the central point.  Multiplicative
Haar measure gives the unit group volume 1, so Vol(1+p) = 1/(q-1); the
additive-probability normalization on GL2(o) gives Vol(K0[p]) = 1/(q+1).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .characters import AddChar, MultChar
from .errors import (BadSubset, NotPrime, NotRegular, NotTrivialOnBase,
                     PoleHit, SingularMatrix, UnsupportedCase, UnsupportedChar,
                     UnsupportedConductor, ZeroArgument)
from .field import FieldCtx, QuadExtCtx, make_field
from .series import LocalWeightExpr

_TOL = 1e-12


class _Vanishes:
    """Sentinel for weights that are identically zero for the given data."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Vanishes"


VANISHES = _Vanishes()


@dataclass(frozen=True)
class LocalFieldModel:
    """A finite place with residue cardinality q = p^f."""

    p: int
    f: int = 1

    def __post_init__(self):
        # field construction validates primality and oddness
        make_field(self.p, self.f)

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def residue(self) -> FieldCtx:
        return make_field(self.p, self.f)


# ---------------------------------------------------------------------------
# volumes


def vol_K0(model: LocalFieldModel, n: int = 1) -> float:
    """Vol(K0[p^n]) for the probability measure on GL2(o)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q = model.q
    return 1.0 / (q ** (n - 1) * (q + 1))


def vol_K1(model: LocalFieldModel) -> float:
    """Vol of the subgroup with unipotent-modulo-p diagonal, K1[p]."""
    q = model.q
    return 1.0 / ((q + 1) * (q - 1) ** 2)


def vol_one_plus_p(model: LocalFieldModel) -> float:
    """Vol(1 + p) for d^x normalized with vol(o^x) = 1."""
    return 1.0 / (model.q - 1)


def vol_units(model: LocalFieldModel) -> float:
    return 1.0


# ---------------------------------------------------------------------------
# characters of the local multiplicative group


@dataclass(frozen=True)
class LocalCharParam:
    """A character of F^x with conductor exponent at most 2.

    c is the value at the uniformizer; ram is the residue-field character
    carrying conductor exponent 1.  ram2_k indexes a character of
    (Z/p^2)^x via a fixed primitive root and is consumed only by the
    numerical integrator (it requires f = 1); when set, it must be
    nontrivial on 1 + p, which forces conductor exponent 2.
    """

    c: complex = 1.0 + 0j
    ram: MultChar | None = None
    ram2_k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        if self.ram is not None and self.ram.is_trivial:
            object.__setattr__(self, "ram", None)
        if self.ram2_k and self.ram is not None:
            raise UnsupportedChar("give either ram (level 1) or ram2_k "
                                  "(level 2), not both")

    @property
    def a(self) -> int:
        """Conductor exponent."""
        if self.ram2_k:
            return 2
        return 0 if self.ram is None else 1

    def inv(self) -> "LocalCharParam":
        ram = None if self.ram is None else self.ram.conj()
        return LocalCharParam(1.0 / self.c, ram, -self.ram2_k if self.ram2_k else 0)

    def residue_value(self, code: int) -> complex:
        """Value of the level-<=1 part at a residue-field unit code."""
        if self.ram is None:
            return 1.0 + 0j
        return self.ram(code)

    def is_trivial(self) -> bool:
        return self.a == 0 and abs(self.c - 1.0) < _TOL


def trivial_local_char() -> LocalCharParam:
    return LocalCharParam()


# ---------------------------------------------------------------------------
# test-function families


@dataclass(frozen=True)
class Case1:
    """Conductor-exponent-1 family: normalized indicator of K0[p]."""

    model: LocalFieldModel
    xi_pm: int = 1

    def __post_init__(self):
        if self.xi_pm not in (1, -1):
            raise ValueError("xi_pm must be +1 or -1")


@dataclass(frozen=True)
class Case2NS:
    """Principal-series / twisted-Steinberg family at conductor exponent 2n.

    The test function transports the xi-weighted indicator of K0[p^n] by a
    unipotent element of depth n.  variant chooses between the two
    transport conventions ('conj' conjugates by n(-w^-n); 'shift' uses
    n(-w^-n) g n(w^n)); see the integrator for the comparison.
    """

    model: LocalFieldModel
    n: int = 1
    xi_pm: int = -1
    xi2_k: int = 0   # level-2 residue data for n = 2 (integrator only)
    variant: str = "conj"

    def __post_init__(self):
        if self.n not in (1, 2):
            raise UnsupportedCase("n must be 1 or 2")
        if self.xi_pm not in (1, -1):
            raise ValueError("xi_pm must be +1 or -1")
        if self.variant not in ("conj", "shift"):
            raise ValueError("variant must be 'conj' or 'shift'")
        if self.n == 2 and not self.xi2_k:
            raise UnsupportedChar("n = 2 requires level-2 residue data xi2_k")


@dataclass(frozen=True)
class Case2SC:
    """Depth-zero supercuspidal family from a regular character theta of the
    quadratic residue extension, trivial on the base field units."""

    qctx: QuadExtCtx
    theta: MultChar

    def __post_init__(self):
        qctx = self.qctx
        if self.theta.ctx is not qctx.ext:
            raise NotTrivialOnBase("theta must live on the quadratic extension")
        q = qctx.q
        if self.theta.k % (q - 1) != 0:
            raise NotTrivialOnBase("theta must be trivial on base-field units")
        if (self.theta.k * (q - 1)) % (qctx.ext.q - 1) == 0:
            raise NotRegular("theta must not be fixed by the Frobenius twist")

    @property
    def model(self) -> LocalFieldModel:
        return LocalFieldModel(self.qctx.base.p, self.qctx.base.f)


@dataclass(frozen=True)
class Case3:
    """Simple supercuspidal family: psi-twisted indicator of K1[p].

    t is a unit code of the residue field entering the character
    psi(w^-1 (r1 + t r2)) on K1[p].
    """

    model: LocalFieldModel
    t: int = 1

    def __post_init__(self):
        if self.t % self.model.q == 0:
            raise ZeroArgument("t must be a residue-field unit")


# ---------------------------------------------------------------------------
# third-moment weights


def m3_value(case) -> float:
    """M3 of the family at its target representation.

    Exact for all families except Case2NS, where only the exhibited
    lower-bound summand is available (see m3_is_exact).
    """
    if isinstance(case, Case1):
        q = case.model.q
        x = case.xi_pm / q
        return (1 + x) / (1 - x)
    if isinstance(case, Case2NS):
        q = case.model.q
        return q ** (-case.n) * (1 + 1.0 / q)
    if isinstance(case, Case2SC):
        return 1.0
    if isinstance(case, Case3):
        return 1.0 / (case.model.q - 1)
    raise UnsupportedCase(f"unknown case {type(case).__name__}")


def m3_is_exact(case) -> bool:
    return not isinstance(case, Case2NS)


def m3_principal_unram(model: LocalFieldModel, s) -> complex:
    """M3 of the Case1 family at the unramified principal series point s."""
    q = model.q
    d1 = 1 - q ** (-0.5 + complex(s))
    d2 = 1 - q ** (-0.5 - complex(s))
    if abs(d1) < _TOL or abs(d2) < _TOL:
        raise PoleHit(f"principal-series M3 pole at s = {s}")
    return 2.0 / (d1 * d2)


def macdonald_sigma1(model: LocalFieldModel, s) -> complex:
    """Off-diagonal coefficient of the Gram matrix of old vectors."""
    q = model.q
    return q ** -0.5 / (1 + 1.0 / q) * (q ** complex(s) + q ** (-complex(s)))


# ---------------------------------------------------------------------------
# the depth-zero character table


def char_table(qctx: QuadExtCtx, theta: MultChar, g) -> complex:
    """Character of the dimension q-1 cuspidal representation at g in GL2(k).

    g is a length-4 sequence of base-field codes (row major).  Raises
    SingularMatrix off GL2.
    """
    base = qctx.base
    a1, a2, a3, a4 = (int(x) for x in g)
    det = base.sub(base.mul(a1, a4), base.mul(a2, a3))
    if det == 0:
        raise SingularMatrix("char table is defined on GL2 only")
    if a2 == 0 and a3 == 0 and a1 == a4:
        return complex(base.q - 1)
    tr = base.add(a1, a4)
    return _tr_det_table(qctx, theta.k)[tr, det]


@lru_cache(maxsize=None)
def _tr_det_table(qctx: QuadExtCtx, theta_k: int) -> np.ndarray:
    """Table of the cuspidal character over (trace, det), non-scalar matrices.

    Entries: -1 on the degenerate (square-zero discriminant) classes, 0 on
    split regular classes, -theta(y) - theta(y^iota) on elliptic ones.
    """
    base, ext = qctx.base, qctx.ext
    theta = MultChar(ext, theta_k)
    q = base.q
    out = np.zeros((q, q), dtype=np.complex128)
    for tr in range(q):
        for det in range(q):
            disc = base.sub(base.mul(tr, tr),
                            base.mul(base.add(base.add(1, 1), base.add(1, 1)), det))
            if disc == 0:
                out[tr, det] = -1.0
            elif base.is_square(disc):
                out[tr, det] = 0.0
            else:
                y1, y2 = qctx.solve_quadratic(base.neg(tr), det)
                out[tr, det] = -(theta(y1) + theta(y2))
    return out


# ---------------------------------------------------------------------------
# the one-dimensional twisted integrals


def gauss_integral(model: LocalFieldModel, a: int, chi: LocalCharParam,
                   w=0.5) -> complex:
    """Integral over o of psi(w^-1 a x) chi(x) |x|^w d^x x.

    a is a residue-field unit code scaling the level-one additive twist.
    Supports conductor exponent <= 1; raises UnsupportedConductor beyond.
    """
    ctx = model.residue
    q = model.q
    if a % q == 0:
        raise ZeroArgument("the additive twist scale must be a unit")
    if chi.a >= 2:
        raise UnsupportedConductor("closed form needs conductor exponent <= 1")
    psi_a = AddChar(ctx, a)
    units = np.arange(1, q)
    vals = psi_a.values()[1:]
    if chi.ram is not None:
        vals = vals * chi.ram.values()[1:]
    v0 = complex(np.sum(vals)) / (q - 1)
    if chi.a == 1:
        return v0  # deeper shells integrate the ramified character to zero
    x = chi.c * q ** (-complex(w))
    if abs(1 - x) < _TOL:
        raise PoleHit("geometric tail pole in the twisted integral")
    return v0 + x / (1 - x)


def _tail(q: int, c: complex, w, ramified: bool) -> complex:
    """sum over v >= 1 of (c q^-w)^v, zero for ramified characters."""
    if ramified:
        return 0j
    x = c * q ** (-complex(w))
    if abs(1 - x) < _TOL:
        raise PoleHit("pole of the local weight at this s")
    return x / (1 - x)


# ---------------------------------------------------------------------------
# fourth-moment weights, term by term for the depth-zero family

_ADMISSIBLE_I = {(), (1,), (2,), (3,), (4,), (1, 4), (2, 3)}


def m4I_term(case: Case2SC, chi: LocalCharParam, s, I) -> complex:
    """One summand of M4 for the depth-zero family, indexed by the set of
    matrix slots forced into p.  Only the seven admissible slot sets give a
    nonzero region; anything else raises BadSubset."""
    I = tuple(sorted(int(i) for i in I))
    if I not in _ADMISSIBLE_I:
        raise BadSubset(f"slot set {I} does not meet the support")
    if chi.a >= 2:
        return 0j
    qctx = case.qctx
    base = qctx.base
    q = base.q
    s = complex(s)
    ram = chi.a == 1

    # geometric factors of the slots forced into p
    tails = 1.0 + 0j
    for i in I:
        if i in (1, 4):
            tails *= _tail(q, chi.c, 0.5 + s, ram)
        else:
            tails *= _tail(q, 1.0 / chi.c, 0.5 - s, ram)
    if tails == 0:
        return 0j

    # residue sum over the unit slots
    units = np.arange(1, q, dtype=np.int64)
    chi_u = np.ones(q, dtype=np.complex128)
    if chi.ram is not None:
        chi_u = chi.ram.values().copy()
        chi_u[0] = 1.0
    table = _tr_det_table(qctx, case.theta.k)

    def entry(i, shape_axes):
        """units broadcast along its own axis, or the zero slot."""
        if i in I:
            return np.zeros(1, dtype=np.int64).reshape((1,) * len(shape_axes))
        ax = shape_axes.index(i)
        sh = [1] * len(shape_axes)
        sh[ax] = q - 1
        return units.reshape(sh)

    free = [i for i in (1, 2, 3, 4) if i not in I]
    a = {i: entry(i, free) for i in (1, 2, 3, 4)}
    mul, add, sub = base.mul_vec, base.add_vec, lambda x, y: base.add_vec(
        x, base.neg_vec(y))
    det = sub(mul(a[1], a[4]), mul(a[2], a[3]))
    tr = add(a[1], a[4])
    det_b, tr_b = np.broadcast_arrays(det, tr)
    vals = np.conj(table[tr_b, det_b])
    vals = np.where(det_b == 0, 0, vals)
    # scalar residues only occur when slots 2 and 3 are both forced to zero
    if I == (2, 3):
        scal = units.reshape(-1, 1) == units.reshape(1, -1)
        vals = np.where(scal & (det_b != 0), q - 1.0, vals)
    ratio = chi_u[a[1]] * chi_u[a[4]] * np.conj(chi_u[a[2]] * chi_u[a[3]])
    S = complex(np.sum(vals * np.broadcast_to(ratio, vals.shape)))
    return (q - 1.0) ** (1 - (4 - len(I))) * S * tails


def m4_empty_split(case: Case2SC, chi: LocalCharParam, s=0.0):
    """The all-units term split by discriminant class.

    Returns (degenerate part, elliptic part): the first sums the residues
    whose trace/determinant give a square-zero discriminant, the second the
    non-square discriminants.  Split regular classes contribute zero, so the
    two parts add up to the full empty-slot term.
    """
    if chi.a >= 2:
        return 0j, 0j
    qctx = case.qctx
    base = qctx.base
    q = base.q
    units = np.arange(1, q, dtype=np.int64)
    chi_u = np.ones(q, dtype=np.complex128)
    if chi.ram is not None:
        chi_u = chi.ram.values().copy()
        chi_u[0] = 1.0
    table = _tr_det_table(qctx, case.theta.k)
    a1 = units.reshape(-1, 1, 1, 1)
    a2 = units.reshape(1, -1, 1, 1)
    a3 = units.reshape(1, 1, -1, 1)
    a4 = units.reshape(1, 1, 1, -1)
    mul, add = base.mul_vec, base.add_vec
    det = add(mul(a1, a4), base.neg_vec(mul(a2, a3)))
    tr = add(a1, a4)
    det_b, tr_b = np.broadcast_arrays(det, tr)
    four = base.add(base.add(1, 1), base.add(1, 1))
    disc = add(mul(tr_b, tr_b), base.neg_vec(mul(np.full_like(det_b, four),
                                                 det_b)))
    sq = np.zeros(q, dtype=bool)
    for u in range(1, q):
        sq[base.mul(u, u)] = True
    vals = np.conj(table[tr_b, det_b])
    vals = np.where(det_b == 0, 0, vals)
    ratio = np.broadcast_to(chi_u[a1] * chi_u[a4]
                            * np.conj(chi_u[a2] * chi_u[a3]), vals.shape)
    norm = (q - 1.0) ** -3
    part0 = norm * complex(np.sum(np.where((disc == 0) & (det_b != 0),
                                           vals * ratio, 0)))
    part1 = norm * complex(np.sum(np.where((det_b != 0) & (disc != 0)
                                           & ~sq[disc], vals * ratio, 0)))
    return part0, part1


def _x_over_1mx(q: float, a: complex, positive_u: bool) -> LocalWeightExpr:
    """x/(1-x) as an expression, x = a*u (positive_u) or a/u."""
    if positive_u:
        return LocalWeightExpr(q, (0j, a), (1.0, -a))
    return LocalWeightExpr(q, (a,), (-a, 1.0))


def m4_closed(case, chi: LocalCharParam | None = None, s=0.0,
              symbolic: bool = False):
    """The dual weight M4(case | chi, 1/2 + s), exact.

    Returns VANISHES when the weight is identically zero for this chi,
    a complex value otherwise, or a LocalWeightExpr in s when symbolic is
    set (symbolic requires the trivial character).  Case2NS admits a closed
    form only for n = 1 and trivial chi; other characters there raise
    UnsupportedChar (the numerical integrator still covers them).
    """
    if chi is None:
        chi = trivial_local_char()
    q = float(case.model.q) if not isinstance(case, Case2SC) else float(
        case.qctx.q)
    rq = q ** -0.5

    if isinstance(case, Case1):
        if chi.a != 0:
            return VANISHES
        a = rq / chi.c
        expr = LocalWeightExpr(q, (0j, a * (q + 1)), (a * a, -2 * a, 1.0))
        return expr if symbolic else _eval_expr(expr, s)

    if isinstance(case, Case2NS):
        if not chi.is_trivial() or case.n != 1:
            raise UnsupportedChar("closed form only for the trivial character "
                                  "at n = 1; use the integrator otherwise")
        e = float(case.model.residue.is_square(
            case.model.residue.neg(1))) * 2 - 1  # xi(-1) = +-1
        # rational in u = q^{-s}; derived by exact evaluation of the
        # conjugated-support integral (deep-valuation chains in each of the
        # four entries resummed geometrically); even in s iff xi(-1) = +1
        rq32 = q ** 1.5
        num = [(q ** 3 + q * e), -4 * rq32 * (q + e), 6 * q * q * (1 + e),
               -4 * rq32 * (q * e + 1), (q ** 3 * e + q)]
        num = [(q + 1) * c for c in num]
        root = (q ** 0.5, -(1 + q), q ** 0.5)   # sqrt(q) u^2 - (1+q) u + sqrt(q)
        den = np.convolve(root, root) * (q - 1) ** 3
        expr = LocalWeightExpr(q, tuple(num), tuple(den))
        return expr if symbolic else _eval_expr(expr, s)

    if isinstance(case, Case2SC):
        if chi.a >= 2:
            return VANISHES
        if symbolic:
            if not chi.is_trivial():
                raise UnsupportedChar("symbolic form only for the trivial "
                                      "character")
            X = _x_over_1mx(q, rq, positive_u=False)   # X/(1-X), X = q^{s-1/2}
            Y = _x_over_1mx(q, rq, positive_u=True)    # Y/(1-Y), Y = q^{-s-1/2}
            tb = np.conj(case.theta(case.qctx.omega))
            # the slot-{1} and slot-{4} regions each contribute tb * Y/(1-Y):
            # their residue sum is (q-1)^2 theta(omega), not zero (the coset
            # sum over beta of theta(1 + beta*omega) equals -1 - theta(omega))
            # the all-units region contributes (1 - theta(omega))/(q - 1),
            # which is 2/(q-1) or 0 depending on the sign theta takes at omega
            return (-2.0) * X + (q - 1) * X * X - tb * (q - 1) * Y * Y \
                + 2.0 * tb * Y \
                + LocalWeightExpr.const(q, (1.0 - tb.real) / (q - 1))
        return sum(
            (m4I_term(case, chi, s, I) for I in sorted(_ADMISSIBLE_I)), 0j)

    if isinstance(case, Case3):
        if chi.a >= 2:
            return VANISHES
        ci = chi.inv()
        if symbolic:
            if not chi.is_trivial():
                raise UnsupportedChar("symbolic form only for the trivial "
                                      "character")
            g = LocalWeightExpr.const(q, -1.0 / (q - 1)) \
                + _x_over_1mx(q, rq, positive_u=False)
            mid = LocalWeightExpr(q, (rq,), (1.0,), -1)
            return (q + 1) * g * g * mid
        model = case.model
        base = model.residue
        g1 = gauss_integral(model, base.neg(1), ci, w=0.5 - complex(s))
        g2 = gauss_integral(model, base.neg(case.t), ci, w=0.5 - complex(s))
        mid = (1.0 / chi.c) * q ** (complex(s) - 0.5)
        return (q + 1) * g1 * g2 * mid

    raise UnsupportedCase(f"unknown case {type(case).__name__}")


def _eval_expr(expr: LocalWeightExpr, s) -> complex:
    from .errors import DivisionByZeroExpr
    try:
        return expr.eval(s)
    except DivisionByZeroExpr as exc:
        raise PoleHit(str(exc)) from exc
