"""The double character sum S(chi, eta; rho) and its reductions.

S sums rho(alpha + omega) * chi(t) * eta(alpha^2 - eps*t) * conj(eta)(1 - t)
over alpha, t in F_q, where rho lives on the quadratic extension and
omega^2 = eps is the canonical non-square.  Three evaluation routes are
provided (direct double loop, the A/B factorization, and the reduction to
hypergeometric sums), plus bound-verification scans over whole q ranges.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .characters import (MultChar, canonical_psi, enumerate_chars, gauss_sum,
                         quadratic_char, trivial_char)
from .errors import CtxMismatch, InvariantViolation, NotRegular, NotTrivialOnBase
from .field import QuadExtCtx, odd_prime_powers, quad_ext
from .hypergeom import HyperSpec, hyper_all_t, hyper_sum_fast_22

SCAN_FLAG_THRESHOLD = 16.0


@dataclass(frozen=True)
class CharSumInstance:
    """One admissible (chi, eta, rho) triple over a quadratic extension."""

    qctx: QuadExtCtx
    chi: MultChar
    eta: MultChar
    rho: MultChar

    def __post_init__(self):
        if self.chi.ctx is not self.qctx.base or self.eta.ctx is not self.qctx.base:
            raise CtxMismatch("chi and eta must live on the base field")
        if self.rho.ctx is not self.qctx.ext:
            raise CtxMismatch("rho must live on the quadratic extension")
        if self.chi.is_trivial or self.eta.is_trivial or self.rho.is_trivial:
            raise InvariantViolation("chi, eta, rho must all be nontrivial")


def A_sum(inst: CharSumInstance, y: int) -> complex:
    """A(y) = sum of rho(alpha + omega) over the square roots alpha of y."""
    qctx = inst.qctx
    base, ext = qctx.base, qctx.ext
    r = base.sqrt(y)
    if r is None:
        return 0j
    alphas = {r, base.neg(r)}
    return sum((inst.rho(ext.add(qctx.embed(a), qctx.omega)) for a in alphas), 0j)


def B_sum(inst: CharSumInstance, y: int) -> complex:
    """B(y) = sum over t outside {0, 1} of chi(t) * eta(1 - y/(1-t))."""
    base = inst.qctx.base
    total = 0j
    for t in range(2, base.q):  # t = 0, 1 excluded
        arg = base.sub(1, base.mul(y, base.inv(base.sub(1, t))))
        total += inst.chi(t) * inst.eta(arg)
    return total


def _b_spec(inst: CharSumInstance) -> HyperSpec:
    base = inst.qctx.base
    chi0 = trivial_char(base)
    return HyperSpec((chi0, chi0), (inst.chi, inst.eta))


def _b_prefactor(inst: CharSumInstance) -> complex:
    base = inst.qctx.base
    psi = canonical_psi(base)
    return -gauss_sum(inst.chi, psi) * gauss_sum(inst.eta, psi) / base.q ** 0.5


def _y_args(qctx: QuadExtCtx) -> np.ndarray:
    """y_alpha = 1 - alpha^2 / eps for each alpha; never 0 (eps non-square)."""
    base = qctx.base
    alphas = np.arange(base.q)
    a2 = base.mul_vec(alphas, alphas)
    ratio = base.mul_vec(a2, np.full(base.q, base.inv(qctx.eps)))
    y = base.add_vec(np.ones(base.q, dtype=np.int64), base.neg_vec(ratio))
    if np.any(y == 0):
        raise InvariantViolation("eps turned out to be a square")
    return y


def _rho_at_line(qctx: QuadExtCtx, rho: MultChar) -> np.ndarray:
    """rho(alpha + omega) for alpha = 0 .. q-1 (never zero, so all units)."""
    ext = qctx.ext
    codes = ext.add_vec(qctx.embed_table, np.full(qctx.q, qctx.omega))
    return rho.values()[codes]


def T_sum(inst: CharSumInstance) -> complex:
    """T = sum over alpha of rho(alpha + omega) * H(1 - alpha^2/eps)."""
    h = hyper_all_t(_b_spec(inst))
    y = _y_args(inst.qctx)
    return complex(np.sum(_rho_at_line(inst.qctx, inst.rho) * h[y]))


def S_eval(inst: CharSumInstance, method: str = "direct") -> complex:
    """Evaluate S by one of three equivalent routes.

    'direct' is the defining double loop, 'via_AB' factors through the
    B table, 'via_T' goes through the hypergeometric reduction.
    """
    qctx = inst.qctx
    base, ext = qctx.base, qctx.ext
    if method == "direct":
        return complex(kernels.s_direct(
            inst.rho.values(), inst.chi.values(), inst.eta.values(),
            qctx.embed_table, qctx.omega,
            ext.log_table, ext.exp_table, ext._digits, ext._pow_p, ext.p,
            base.log_table, base.exp_table, base._digits, base._pow_p,
            qctx.eps))
    if method == "via_AB":
        y = _y_args(qctx)
        b = np.array([B_sum(inst, int(v)) for v in np.unique(y)])
        lut = dict(zip(np.unique(y).tolist(), b))
        rho_line = _rho_at_line(qctx, inst.rho)
        total = sum(rho_line[a] * lut[int(y[a])] for a in range(base.q))
        return inst.eta(qctx.eps) * complex(total)
    if method == "via_T":
        return inst.eta(qctx.eps) * _b_prefactor(inst) * T_sum(inst)
    raise ValueError(f"unknown method {method!r}")


def S_theta(qctx: QuadExtCtx, theta: MultChar, chi: MultChar) -> complex:
    """The specialized sum for a regular character trivial on the base field.

    S(theta, chi) = sum over alpha, t of conj(theta)(alpha + omega) * chi(t)
    * phi(alpha^2 - eps*t) * phi(1 - t) with phi the quadratic character.
    Raises unless theta is trivial on embed(F_q)^x and regular.
    """
    if theta.ctx is not qctx.ext or chi.ctx is not qctx.base:
        raise CtxMismatch("theta on the extension, chi on the base field")
    q = qctx.q
    n2 = qctx.ext.q - 1
    if theta.k % (q - 1) != 0:
        raise NotTrivialOnBase("theta is not trivial on the base field units")
    if (theta.k * (q - 1)) % n2 == 0:
        raise NotRegular("theta is fixed by the Frobenius twist")
    base = qctx.base
    phi = quadratic_char(base)
    rho_line = _rho_at_line(qctx, theta.conj())
    phi_vals = phi.values()
    chi_vals = chi.values()
    t = np.arange(q)
    one_minus_t = base.add_vec(np.ones(q, dtype=np.int64), base.neg_vec(t))
    eps_t = base.mul_vec(np.full(q, qctx.eps), t)
    row = chi_vals * phi_vals[one_minus_t]
    total = 0j
    for alpha in range(q):
        a2 = base.mul(alpha, alpha)
        arg = base.add_vec(np.full(q, a2), base.neg_vec(eps_t))
        total += rho_line[alpha] * np.sum(row * phi_vals[arg])
    return complex(total)


def _rho_ks(qctx: QuadExtCtx, restricted: bool) -> list[int]:
    if restricted:
        chars = enumerate_chars(qctx.ext, "nontrivial", "trivial_on_base",
                               "regular", qctx=qctx)
    else:
        chars = enumerate_chars(qctx.ext, "nontrivial")
    return [c.k for c in chars]


def scan(qmin: int, qmax: int, rho_restricted: bool = False) -> dict:
    """Sweep all admissible triples for every odd prime power in range.

    For each q the B table is built once per (chi, eta) pair and the rho
    sweep is a single matrix product, so a full q <= 31 scan stays cheap.
    Returns per-q argmax rows and overall maxima of |S|/q and |T|/sqrt(q).
    """
    rows = []
    for p, f in odd_prime_powers(qmin, qmax):
        qctx = quad_ext(p, f)
        base, ext = qctx.base, qctx.ext
        q = base.q
        n2 = ext.q - 1
        rho_ks = np.array(_rho_ks(qctx, rho_restricted), dtype=np.int64)
        line = ext.add_vec(qctx.embed_table, np.full(q, qctx.omega))
        line_logs = ext.log_table[line]
        rho_mat = np.exp(2j * np.pi * ((rho_ks[:, None] * line_logs[None, :]) % n2) / n2)
        y = _y_args(qctx)
        best = None
        for chi in enumerate_chars(base, "nontrivial"):
            for eta in enumerate_chars(base, "nontrivial"):
                chi0 = trivial_char(base)
                h = hyper_all_t(HyperSpec((chi0, chi0), (chi, eta)))
                psi = canonical_psi(base)
                pref = -gauss_sum(chi, psi) * gauss_sum(eta, psi) / q ** 0.5
                b = pref * h[y]                      # B(y_alpha) for each alpha
                t_vec = rho_mat @ h[y]               # T per rho
                s_vec = eta(qctx.eps) * (rho_mat @ b)
                i = int(np.argmax(np.abs(s_vec)))
                cand = (abs(s_vec[i]) / q, abs(t_vec[i]) / q ** 0.5,
                        chi.k, eta.k, int(rho_ks[i]), complex(s_vec[i]))
                if best is None or cand[0] > best[0]:
                    best = cand
        if best is None:
            continue
        s_over_q, t_over_sq, chi_k, eta_k, rho_k, s_val = best
        rows.append({
            "q": q, "chi_k": chi_k, "eta_k": eta_k, "rho_k": rho_k,
            "re_S": s_val.real, "im_S": s_val.imag,
            "abs_S_over_q": s_over_q, "abs_T_over_sqrt_q": t_over_sq,
            "flagged": s_over_q > SCAN_FLAG_THRESHOLD,
        })
    return {
        "rows": rows,
        "rho_restricted": rho_restricted,
        "max_abs_S_over_q": max((r["abs_S_over_q"] for r in rows), default=0.0),
        "max_abs_T_over_sqrt_q": max((r["abs_T_over_sqrt_q"] for r in rows),
                                     default=0.0),
        "any_flagged": any(r["flagged"] for r in rows),
    }
