import itertools

import pytest

from momentkit.characters import MultChar, enumerate_chars, quadratic_char
from momentkit.charsum import (A_sum, B_sum, CharSumInstance, S_eval, S_theta,
                               T_sum, scan)
from momentkit.errors import (CtxMismatch, InvariantViolation, NotRegular,
                              NotTrivialOnBase)
from momentkit.field import quad_ext


def make_inst(p, f, chi_k=1, eta_k=2, rho_k=1):
    qctx = quad_ext(p, f)
    nb, ne = qctx.base.q - 1, qctx.ext.q - 1
    return CharSumInstance(qctx, MultChar(qctx.base, chi_k % nb or 1),
                           MultChar(qctx.base, eta_k % nb or 1),
                           MultChar(qctx.ext, rho_k % ne or 1))


def test_instance_validation():
    qctx = quad_ext(5, 1)
    base, ext = qctx.base, qctx.ext
    with pytest.raises(InvariantViolation):
        CharSumInstance(qctx, MultChar(base, 0), MultChar(base, 1),
                        MultChar(ext, 1))
    with pytest.raises(CtxMismatch):
        CharSumInstance(qctx, MultChar(ext, 1), MultChar(base, 1),
                        MultChar(ext, 1))
    with pytest.raises(CtxMismatch):
        CharSumInstance(qctx, MultChar(base, 1), MultChar(base, 1),
                        MultChar(base, 1))


def s_reference(inst):
    """Defining double loop, written independently of the kernels."""
    qctx = inst.qctx
    base, ext = qctx.base, qctx.ext
    total = 0j
    for alpha in range(base.q):
        line = ext.add(qctx.embed(alpha), qctx.omega)
        a2 = base.mul(alpha, alpha)
        for t in range(base.q):
            arg = base.sub(a2, base.mul(qctx.eps, t))
            total += (inst.rho(line) * inst.chi(t)
                      * inst.eta(arg) * inst.eta(base.sub(1, t)).conjugate())
    return total


@pytest.mark.parametrize("p,f", [(3, 1), (5, 1), (7, 1), (3, 2)])
def test_direct_matches_reference(p, f):
    inst = make_inst(p, f)
    q = inst.qctx.q
    assert abs(S_eval(inst, "direct") - s_reference(inst)) < 1e-9 * q


@pytest.mark.parametrize("p,f", [(5, 1), (7, 1), (3, 2)])
@pytest.mark.parametrize("method", ["via_AB", "via_T"])
def test_methods_agree(p, f, method):
    qctx = quad_ext(p, f)
    base, ext = qctx.base, qctx.ext
    chis = enumerate_chars(base, "nontrivial")[:3]
    rhos = enumerate_chars(ext, "nontrivial")[:3]
    for chi, eta, rho in itertools.product(chis, chis, rhos):
        inst = CharSumInstance(qctx, chi, eta, rho)
        assert abs(S_eval(inst, method) - S_eval(inst, "direct")) \
            < 1e-7 * base.q


def test_unknown_method_rejected():
    with pytest.raises(ValueError):
        S_eval(make_inst(5, 1), "nope")


def test_a_sum_counts_square_roots():
    inst = make_inst(7, 1)
    base = inst.qctx.base
    for y in range(7):
        n_roots = sum(1 for a in range(7) if base.mul(a, a) == y)
        if n_roots == 0:
            assert A_sum(inst, y) == 0j
        else:
            assert abs(A_sum(inst, y)) <= n_roots + 1e-12


def test_b_sum_definition():
    inst = make_inst(5, 1, chi_k=1, eta_k=3)
    base = inst.qctx.base
    for y in range(5):
        total = 0j
        for t in range(5):
            if t in (0, 1):
                continue
            arg = base.sub(1, base.mul(y, base.inv(base.sub(1, t))))
            total += inst.chi(t) * inst.eta(arg)
        assert abs(B_sum(inst, y) - total) < 1e-12


def test_s_theta_validation_and_symmetry():
    qctx = quad_ext(5, 1)
    base, ext = qctx.base, qctx.ext
    chi = MultChar(base, 1)
    with pytest.raises(NotTrivialOnBase):
        S_theta(qctx, MultChar(ext, 1), chi)
    # k = 12 = 3 * (q - 1) but fixed by Frobenius: 12 * 4 = 48 = 0 mod 24
    with pytest.raises(NotRegular):
        S_theta(qctx, MultChar(ext, 12), chi)
    theta = enumerate_chars(ext, "nontrivial", "trivial_on_base", "regular",
                            qctx=qctx)[0]
    val = S_theta(qctx, theta, chi)
    # brute-force the defining sum
    phi = quadratic_char(base)
    ref = 0j
    for alpha in range(5):
        line = ext.add(qctx.embed(alpha), qctx.omega)
        for t in range(5):
            arg = base.sub(base.mul(alpha, alpha), base.mul(qctx.eps, t))
            ref += (theta(line).conjugate() * chi(t) * phi(arg)
                    * phi(base.sub(1, t)))
    assert abs(val - ref) < 1e-9


def test_t_sum_consistent_with_via_t():
    inst = make_inst(7, 1, chi_k=2, eta_k=5, rho_k=4)
    # S_eval('via_T') is eta(eps) * prefactor * T; just check T is finite
    # and that the route built on it agrees with the direct loop
    t = T_sum(inst)
    assert abs(t) < 100
    assert abs(S_eval(inst, "via_T") - S_eval(inst, "direct")) < 1e-7


def test_scan_small_range():
    out = scan(3, 7)
    assert {r["q"] for r in out["rows"]} == {3, 5, 7}
    assert out["max_abs_S_over_q"] <= 1000
    assert not out["any_flagged"]
    for row in out["rows"]:
        assert set(row) >= {"q", "chi_k", "eta_k", "rho_k", "abs_S_over_q",
                            "abs_T_over_sqrt_q", "flagged"}
    restricted = scan(3, 7, rho_restricted=True)
    assert restricted["rho_restricted"] is True
    assert restricted["max_abs_S_over_q"] <= out["max_abs_S_over_q"] + 1e-12
