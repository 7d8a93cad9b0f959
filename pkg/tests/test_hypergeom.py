import math

import numpy as np
import pytest

from momentkit.characters import (MultChar, canonical_psi, enumerate_chars,
                                  trivial_char)
from momentkit.errors import CtxMismatch, ShapeMismatch, ZeroArgument
from momentkit.field import make_field
from momentkit.hypergeom import (HyperSpec, classify_exceptional, disjoint,
                                 hyper_all_t, hyper_sum, hyper_sum_fast_22)


def kloosterman_spec(ctx):
    chi0 = trivial_char(ctx)
    return HyperSpec((chi0, chi0), ())


@pytest.mark.parametrize("p,f", [(3, 1), (5, 1), (7, 1), (3, 2), (13, 1)])
def test_kloosterman_matches_defining_sum(p, f):
    # the (2, 0) shape with trivial characters is -K(t)/sqrt(q)
    ctx = make_field(p, f)
    q = ctx.q
    psi = canonical_psi(ctx)
    spec = kloosterman_spec(ctx)
    for t in range(1, q):
        k = sum(psi(ctx.add(x, ctx.mul(t, ctx.inv(x))))
                for x in range(1, q))
        assert abs(hyper_sum(spec, t) - (-k / math.sqrt(q))) < 1e-10


def test_zero_argument_rejected():
    ctx = make_field(5, 1)
    with pytest.raises(ZeroArgument):
        hyper_sum(kloosterman_spec(ctx), 0)


def test_spec_validation():
    c3, c5 = make_field(3, 1), make_field(5, 1)
    with pytest.raises(ShapeMismatch):
        HyperSpec((), ())
    with pytest.raises(CtxMismatch):
        HyperSpec((MultChar(c3, 1),), (MultChar(c5, 1),))


@pytest.mark.parametrize("p,f", [(5, 1), (7, 1), (3, 2)])
def test_fast_22_matches_slow(p, f):
    ctx = make_field(p, f)
    chi0 = trivial_char(ctx)
    for chi in enumerate_chars(ctx, "nontrivial"):
        for eta in enumerate_chars(ctx, "nontrivial"):
            spec = HyperSpec((chi0, chi0), (chi, eta))
            table = hyper_all_t(spec)
            for t in range(1, ctx.q):
                slow = hyper_sum(spec, t)
                assert abs(hyper_sum_fast_22(spec, t) - slow) < 1e-9
                assert abs(table[t] - slow) < 1e-9


def test_disjoint():
    ctx = make_field(7, 1)
    c = [MultChar(ctx, k) for k in range(6)]
    assert disjoint(HyperSpec((c[1], c[2]), (c[3], c[4])))
    assert not disjoint(HyperSpec((c[1], c[2]), (c[2], c[4])))


def test_classify_kummer_positive():
    # chi = {k0, k0 + nu/2} is the full square-root multiset of chi^2
    ctx = make_field(7, 1)
    nu = 6
    k0 = 1
    chi = (MultChar(ctx, k0), MultChar(ctx, (k0 + nu // 2) % nu))
    eta = (MultChar(ctx, 2), MultChar(ctx, (2 + nu // 2) % nu))
    got = classify_exceptional(HyperSpec(chi, eta))
    assert got["kummer"] == 2


def test_classify_belyi_positive():
    # q = 7: chi solves x^2 = alpha and x^1 = beta jointly with a = 2, b = 1;
    # eta is the full cube-root set of alpha * beta
    ctx = make_field(7, 1)
    chi = (MultChar(ctx, 2), MultChar(ctx, 4))
    eta = (MultChar(ctx, 0), MultChar(ctx, 3))
    got = classify_exceptional(HyperSpec(chi, eta))
    assert got["belyi"] is not None
    a, b = got["belyi"]
    assert a + b == 2  # m = 2 split


def test_classify_generic_negative():
    ctx = make_field(11, 1)
    chi0 = trivial_char(ctx)
    spec = HyperSpec((chi0, chi0), (MultChar(ctx, 1), MultChar(ctx, 3)))
    got = classify_exceptional(spec)
    assert got["kummer"] is None
    assert got["belyi"] is None
    assert got["inverse_belyi"] is None


def test_hyper_all_t_shape_and_zero_slot():
    ctx = make_field(9 // 3, 2)  # F_9
    chi0 = trivial_char(ctx)
    spec = HyperSpec((chi0, chi0), (MultChar(ctx, 1), MultChar(ctx, 2)))
    table = hyper_all_t(spec)
    assert table.shape == (ctx.q,)
    assert table[0] == 0
