"""Global bookkeeping: conductors, vanishing logic, and the toy assembly.

A GlobalSpec is a totally-real degree-r configuration: one archimedean
entry (T_v, Delta_v, eps_v) per real place and a list of finite places,
each carrying a residue cardinality and one of the five local test-function
families.  On top of that this module computes conductor aggregates and the
headline exponent, the vanishing decision tree for the degenerate third
moment, the archimedean third-moment weight (in log space), the local
fourth-moment weight factors as rational expressions in q^(-s), and the toy
fourth-moment residue assembly over Q.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .characters import enumerate_chars
from .errors import MissingArchStub, UnsupportedCase, UsageError
from .field import prime_factors, quad_ext
from .padic import (Case1, Case2NS, Case2SC, Case3, LocalFieldModel,
                    m4_closed)
from .series import LaurentSeries, LocalWeightExpr, expand_at, one_minus_u

CASE_NAMES = ("case1", "case2ns", "case2sc", "case3", "case4ns")

# conductor exponent a(pi_p) of each family
CASE_COND_EXP = {"case1": 1, "case2ns": 2, "case2sc": 2, "case3": 3,
                 "case4ns": 4}

# per-case (e1, e0): ledger coefficients at the two assembly centers are
# bounded by 10 * C(pi_p)^e with C(pi_p) = q^a
D4_EXPONENTS = {"case1": (1.0, 0.0), "case2ns": (0.5, 0.5),
                "case2sc": (0.5, 0.5), "case3": (2 / 3, -1 / 3),
                "case4ns": (0.5, 0.5)}


def _split_prime_power(q: int) -> tuple[int, int]:
    """(p, f) with q = p^f for an odd prime power q; UsageError otherwise."""
    if q < 3:
        raise UsageError(f"q = {q} is not an odd prime power")
    ps = prime_factors(q)
    if len(ps) != 1 or ps[0] == 2:
        raise UsageError(f"q = {q} is not an odd prime power")
    p = ps[0]
    f = 0
    m = q
    while m > 1:
        m //= p
        f += 1
    if p ** f != q:
        raise UsageError(f"q = {q} is not a prime power")
    return p, f


@dataclass(frozen=True)
class ArchPlace:
    """One real place: spectral center T, window width Delta, parity eps."""

    T: float = 0.0
    delta: float = 1.0
    eps: int = 0

    def __post_init__(self):
        if not (self.T >= 0 and math.isfinite(self.T)):
            raise UsageError("T must be finite and >= 0")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise UsageError("delta must be finite and > 0")
        if self.eps not in (0, 1):
            raise UsageError("eps must be 0 or 1")


@dataclass(frozen=True)
class FinitePlace:
    """One finite place: residue cardinality and test-function family."""

    q: int
    case: str

    def __post_init__(self):
        if self.case not in CASE_NAMES:
            raise UsageError(f"unknown case {self.case!r}; "
                             f"expected one of {CASE_NAMES}")
        _split_prime_power(self.q)

    @property
    def cond_exp(self) -> int:
        return CASE_COND_EXP[self.case]

    @property
    def conductor(self) -> int:
        return self.q ** self.cond_exp


@dataclass(frozen=True)
class GlobalSpec:
    """A degree-r totally real configuration with finite ramification data."""

    r: int = 1
    arch: tuple = ()
    finite: tuple = ()

    def __post_init__(self):
        if self.r < 1:
            raise UsageError("degree r must be >= 1")
        arch = tuple(self.arch) if self.arch else tuple(
            ArchPlace() for _ in range(self.r))
        if len(arch) != self.r:
            raise UsageError("need exactly one archimedean entry per degree")
        object.__setattr__(self, "arch", arch)
        object.__setattr__(self, "finite", tuple(self.finite))

    @classmethod
    def from_dict(cls, data: dict) -> "GlobalSpec":
        if not isinstance(data, dict):
            raise UsageError("spec must be a JSON object")
        unknown = set(data) - {"r", "arch", "finite"}
        if unknown:
            raise UsageError(f"unknown spec keys: {sorted(unknown)}")
        r = data.get("r", 1)
        if not isinstance(r, int):
            raise UsageError("r must be an integer")
        arch = []
        for entry in data.get("arch", []):
            bad = set(entry) - {"T", "delta", "eps"}
            if bad:
                raise UsageError(f"unknown arch keys: {sorted(bad)}")
            arch.append(ArchPlace(float(entry.get("T", 0.0)),
                                  float(entry.get("delta", 1.0)),
                                  int(entry.get("eps", 0))))
        finite = []
        for entry in data.get("finite", []):
            bad = set(entry) - {"q", "case"}
            if bad:
                raise UsageError(f"unknown finite-place keys: {sorted(bad)}")
            if "q" not in entry or "case" not in entry:
                raise UsageError("finite places need both 'q' and 'case'")
            finite.append(FinitePlace(int(entry["q"]), str(entry["case"])))
        return cls(r, tuple(arch), tuple(finite))

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "arch": [{"T": a.T, "delta": a.delta, "eps": a.eps}
                     for a in self.arch],
            "finite": [{"q": pl.q, "case": pl.case} for pl in self.finite],
        }


# ---------------------------------------------------------------------------
# conductor aggregation and the headline exponent


def conductors(spec: GlobalSpec) -> dict:
    """C_j aggregates, the full conductor, and the exponent report.

    C_j multiplies q^j over the places of conductor exponent j; the bound
    shape is C_1^(1/6) C_3^(1/18) C^(1/6+eps), reported on the log scale
    (the eps slack is left symbolic).
    """
    cj = {j: 1 for j in (1, 2, 3, 4)}
    for pl in spec.finite:
        cj[pl.cond_exp] *= pl.conductor
    total = 1
    for v in cj.values():
        total *= v
    report = {
        "log_C1_over_6": math.log(cj[1]) / 6,
        "log_C3_over_18": math.log(cj[3]) / 18,
        "log_C_over_6": math.log(total) / 6,
    }
    report["log_bound"] = sum(report.values())
    return {"C1": cj[1], "C2": cj[2], "C3": cj[3], "C4": cj[4],
            "C": total, "exponent_report": report}


# ---------------------------------------------------------------------------
# degenerate third moment: vanishing decision tree


@dataclass(frozen=True)
class D3Status:
    """Outcome of the vanishing decision for the degenerate third moment."""

    vanishes: bool
    reason: str
    order: int | None = None


def d3_status(spec: GlobalSpec) -> D3Status:
    """Decide whether the degenerate third moment can be nonzero.

    A supercuspidal family at any place kills it outright; so does a family
    whose spectral weight is a ramified twist (conductor exponent 2 against
    the rank-one degenerate spectrum).  Otherwise the order of vanishing of
    the weight at the center is 3r - 5 + #{places with conductor exponent 1}
    and a nonzero value needs a genuine pole, i.e. order <= -1.
    """
    for pl in spec.finite:
        if pl.case in ("case2sc", "case3"):
            return D3Status(True, f"supercuspidal component at q = {pl.q}")
        if pl.case in ("case2ns", "case4ns"):
            return D3Status(
                True, f"ramified twist component at q = {pl.q} "
                      "(conductor exponent of the twisted degenerate "
                      "spectrum exceeds 1)")
    s1 = sum(1 for pl in spec.finite if pl.case == "case1")
    order = 3 * spec.r - 5 + s1
    if order >= 0:
        return D3Status(True, f"weight vanishes to order {order} >= 0 "
                              "at the center", order)
    return D3Status(False, f"weight has a pole of order {-order} "
                           "at the center", order)


# ---------------------------------------------------------------------------
# archimedean third-moment weight


def _logcosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2 * ax)) - math.log(2.0)


def _logaddexp(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    if b == -math.inf:
        return a
    return a + math.log1p(math.exp(b - a))


def arch_m3(tau: float, T: float, delta: float, parity_match: bool = True,
            log: bool = False) -> float:
    """The archimedean weight at spectral parameter tau, evaluated stably.

    The value is sqrt(pi) cosh(pi tau) / (2 delta) times the square of
    exp(-(tau-T)^2/(2 delta^2) + pi tau/2) + exp(-(tau+T)^2/(2 delta^2)
    - pi tau/2); a parity mismatch gives 0.  All work happens on the log
    scale, and log=True returns the log value directly (-inf at parity
    mismatch), which stays finite up to tau ~ 500 where the plain value
    overflows a double.
    """
    if not parity_match:
        return -math.inf if log else 0.0
    tau = float(tau)
    T, delta = float(T), float(delta)
    a1 = -(tau - T) ** 2 / (2 * delta * delta) + math.pi * tau / 2
    a2 = -(tau + T) ** 2 / (2 * delta * delta) - math.pi * tau / 2
    logval = (0.5 * math.log(math.pi) + _logcosh(math.pi * tau)
              - math.log(2 * delta) + 2 * _logaddexp(a1, a2))
    if log:
        return logval
    if logval > 700:
        raise OverflowError("value exceeds double range; use log=True")
    return math.exp(logval)


# ---------------------------------------------------------------------------
# local fourth-moment weight factors


def default_case(name: str, q: int):
    """A canonical representative of the named family at residue size q."""
    p, f = _split_prime_power(q)
    if name == "case1":
        return Case1(LocalFieldModel(p, f))
    if name == "case2ns":
        return Case2NS(LocalFieldModel(p, f), n=1)
    if name == "case2sc":
        qctx = quad_ext(p, f)
        theta = enumerate_chars(qctx.ext, "nontrivial", "trivial_on_base",
                                "regular", qctx=qctx)[0]
        return Case2SC(qctx, theta)
    if name == "case3":
        return Case3(LocalFieldModel(p, f), t=1)
    raise UnsupportedCase(f"no canonical local model for {name!r}")


def _case_name(case) -> str:
    for name, cls in (("case1", Case1), ("case2ns", Case2NS),
                      ("case2sc", Case2SC), ("case3", Case3)):
        if isinstance(case, cls):
            return name
    raise UnsupportedCase(f"unknown case {type(case).__name__}")


@dataclass(frozen=True)
class Wt4Local:
    """A local fourth-moment weight factor with its conventions attached.

    expr is a rational function of u = q^(-s); the variable s is centered so
    that the global assembly has its potential poles at s = +-1/2 (the
    weight itself is entire there: the removed local zeta factors cancel
    every candidate pole).  flipped records whether the expression carries
    the dual orientation s -> -s relative to m4_closed (always False for
    the implemented families); the consistency identity is
    expr(s) = zeta_factors(s) * m4_closed(s).
    """

    expr: LocalWeightExpr
    case: str
    q: int
    flipped: bool

    def eval(self, s) -> complex:
        return self.expr.eval(s)


def zeta_factors(q: int) -> LocalWeightExpr:
    """(1 - q^(-(1/2+s)))^2 (1 - q^(-(1/2-s)))^2 as an expression in u."""
    up = one_minus_u(q, 0.5)
    um = LocalWeightExpr(q, (-float(q) ** -0.5, 1.0), (1.0,), -1)
    zf = up * um
    return zf * zf


def wt4_local(case, q: int | None = None) -> Wt4Local:
    """The local weight factor of the toy fourth-moment assembly.

    Accepts either a local case object or a case name plus q ('case4ns' is
    available by name only: that family has no implemented test function, so
    its factor is constructed directly from its known closed form).  The
    result is the trivial-character dual weight with the local zeta factors
    multiplied back in, so it is pole-free at the assembly centers.
    """
    if isinstance(case, str):
        name = case
        if name not in CASE_NAMES:
            raise UnsupportedCase(f"unknown case {name!r}")
        if q is None:
            raise UsageError("a case name needs an explicit q")
        if name == "case4ns":
            return Wt4Local(_wt4_case4ns(q), name, q, False)
        case = default_case(name, q)
    else:
        name = _case_name(case)
    qv = case.qctx.q if isinstance(case, Case2SC) else case.model.q
    if q is not None and q != qv:
        raise UsageError(f"q = {q} does not match the case's residue "
                         f"cardinality {qv}")
    m4 = m4_closed(case, symbolic=True)
    return Wt4Local(zeta_factors(qv) * m4, name, qv, False)


def _wt4_case4ns(q: int) -> LocalWeightExpr:
    """The conductor-exponent-4 principal-series factor, built directly."""
    _split_prime_power(q)
    qf = float(q)
    rq = qf ** -0.5
    zp1 = 1.0 / (1.0 - 1.0 / qf)
    inv_p = LocalWeightExpr(qf, (1.0,), (1.0, -rq))        # 1/(1 - q^(-1/2) u)
    inv_m = LocalWeightExpr(qf, (0.0, 1.0), (-rq, 1.0))    # 1/(1 - q^(-1/2)/u)
    u4 = LocalWeightExpr.u_power(qf, 4)
    u4m = LocalWeightExpr.u_power(qf, -4)
    plus = u4 * inv_p * inv_p + (2 * zp1 / qf) * u4 * inv_p \
        + LocalWeightExpr(qf, (1.0 / qf,), (1.0,), 2)
    minus = u4m * inv_m * inv_m + (2 * zp1 / qf) * u4m * inv_m \
        + LocalWeightExpr(qf, (1.0 / qf,), (1.0,), -2)
    return zp1 * zeta_factors(q) * (plus + minus)


# ---------------------------------------------------------------------------
# toy fourth-moment assembly over Q


@lru_cache(maxsize=None)
def _zeta4_series(center: float, nterms: int) -> LaurentSeries:
    """Laurent data of zeta(1/2+s)^2 zeta(1/2-s)^2 at s = center (+-1/2)."""
    mpmath.mp.dps = 30
    gammas = [float(mpmath.stieltjes(n)) for n in range(nterms)]
    taylor = [float(t) for t in mpmath.taylor(mpmath.zeta, 0, nterms - 1)]
    if center == 0.5:
        # zeta(1/2+s) = zeta(1+t): 1/t + sum (-1)^n gamma_n t^n / n!
        pole = LaurentSeries(0.5, -1, tuple(
            [1.0] + [(-1) ** n * gammas[n] / math.factorial(n)
                     for n in range(nterms - 1)]))
        # zeta(1/2-s) = zeta(-t)
        reg = LaurentSeries(0.5, 0, tuple(
            taylor[n] * (-1) ** n for n in range(nterms)))
    elif center == -0.5:
        # zeta(1/2+s) = zeta(t)
        reg = LaurentSeries(-0.5, 0, tuple(taylor))
        # zeta(1/2-s) = zeta(1-t): -1/t + sum gamma_n t^n / n!
        pole = LaurentSeries(-0.5, -1, tuple(
            [-1.0] + [gammas[n] / math.factorial(n)
                      for n in range(nterms - 1)]))
    else:
        raise ValueError("assembly centers are s = +1/2 and s = -1/2")
    return pole * pole * reg * reg


_LEDGER_ORDERS = (-2, -1, 0, 1, 2)


def _stub_series(stub, center: float, nterms: int) -> LaurentSeries:
    if isinstance(stub, LaurentSeries):
        if abs(complex(stub.s0) - center) > 1e-12:
            raise MissingArchStub(f"stub centered at {stub.s0}, "
                                  f"need {center}")
        return stub
    if callable(stub):
        return _stub_series(stub(center), center, nterms)
    if isinstance(stub, (int, float, complex)):
        return LaurentSeries(center, 0, (complex(stub),)
                             + (0j,) * (nterms - 1))
    raise MissingArchStub(f"cannot interpret stub {stub!r}")


def d4_toy(spec: GlobalSpec, arch_stubs=None, order: int = 4) -> dict:
    """Residues of the toy global fourth moment and the per-place ledger.

    The global integrand is zeta(1/2+s)^2 zeta(1/2-s)^2 times the finite
    local factors times one archimedean factor per real place; the latter
    have no formula here and must be supplied as stubs (a scalar, a
    LaurentSeries at the requested center, or a callable center -> series).
    Ledger coefficients are reported against the locally natural variable
    (s - s0) * log q, i.e. the raw Laurent coefficient divided by
    (log q)^n; all five reported orders are finite because the local
    factors are pole-free at both centers.
    """
    if arch_stubs is None:
        raise MissingArchStub("archimedean factors have no built-in formula; "
                              "pass one stub per real place (e.g. 1)")
    if not isinstance(arch_stubs, (list, tuple)):
        arch_stubs = [arch_stubs] * spec.r
    if len(arch_stubs) != spec.r:
        raise MissingArchStub(f"need {spec.r} archimedean stubs, "
                              f"got {len(arch_stubs)}")
    nterms = order + 3
    ledger = []
    factors = {0.5: [], -0.5: []}
    for idx, pl in enumerate(spec.finite):
        w = wt4_local(pl.case, pl.q)
        lnq = math.log(pl.q)
        entry = {"place": idx, "q": pl.q, "case": pl.case}
        for key, center in (("w1", 0.5), ("w0", -0.5)):
            ser = expand_at(w.expr, center, order=max(order, 2))
            factors[center].append(ser)
            entry[key] = {n: _coeff_or_zero(ser, n) / lnq ** n
                          for n in _LEDGER_ORDERS}
        ledger.append(entry)
    residues = {}
    for label, center in (("residue_at_1", 0.5), ("residue_at_0", -0.5)):
        total = _zeta4_series(center, nterms)
        for stub in arch_stubs:
            total = total * _stub_series(stub, center, nterms)
        for ser in factors[center]:
            total = total * ser
        residues[label] = _coeff_or_zero(total, -1)
    residues["difference"] = residues["residue_at_1"] \
        - residues["residue_at_0"]
    return {"ledger": ledger, **residues}


def _coeff_or_zero(ser: LaurentSeries, n: int) -> complex:
    if n < ser.m or n > ser.order_max:
        return 0j
    return ser.coeff(n)
